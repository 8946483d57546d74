#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "crackpath/mesh.hpp"
#include "support.hpp"

using namespace crackpath;

TEST(StructuredMesh, CountsForTwoCells) {
  const Mesh m = build_structured_mesh(2);
  EXPECT_EQ(m.num_nodes(), 13u);
  EXPECT_EQ(m.num_elements(), 16u);
  EXPECT_EQ(m.bottom.size(), 3u);
  for (int id : m.bottom) EXPECT_EQ(m.nodes[id].y, 0.0);
}

TEST(StructuredMesh, CountsScaleWithResolution) {
  for (std::size_t n : {3u, 10u, 37u}) {
    const Mesh m = build_structured_mesh(n);
    EXPECT_EQ(m.num_nodes(), (n + 1) * (n + 1) + n * n);
    EXPECT_EQ(m.num_elements(), 4 * n * n);
    EXPECT_EQ(m.geometry.size(), m.num_elements());
  }
}

TEST(StructuredMesh, RejectsTooFewCells) {
  EXPECT_CRACKPATH_ERROR(build_structured_mesh(1), ErrorCode::InvalidResolution);
  EXPECT_CRACKPATH_ERROR(build_structured_mesh(0), ErrorCode::InvalidResolution);
}

TEST(StructuredMesh, PositiveAreasSumToOne) {
  for (std::size_t n : {2u, 7u, 50u}) {
    const Mesh m = build_structured_mesh(n);
    double total = 0.0;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
      const auto& t = m.elements[e];
      const double a = signed_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
      EXPECT_GT(a, 0.0);
      EXPECT_NEAR(m.geometry[e].area, a, 1e-15);
      total += a;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(StructuredMesh, BoundarySetsMatchCoordinates) {
  const Mesh m = build_structured_mesh(6);
  auto collect = [&](auto pred) {
    std::vector<int> ids;
    for (std::size_t k = 0; k < m.num_nodes(); ++k)
      if (pred(m.nodes[k])) ids.push_back(static_cast<int>(k));
    return ids;
  };
  EXPECT_EQ(m.bottom, collect([](Point p) { return p.y == 0.0; }));
  EXPECT_EQ(m.top, collect([](Point p) { return p.y == 1.0; }));
  EXPECT_EQ(m.left, collect([](Point p) { return p.x == 0.0; }));
  EXPECT_EQ(m.right, collect([](Point p) { return p.x == 1.0; }));
  auto has = [](const std::vector<int>& s, int id) { return std::find(s.begin(), s.end(), id) != s.end(); };
  const int origin = 0;
  EXPECT_TRUE(has(m.bottom, origin) && has(m.left, origin));
  const int top_right = 7 * 7 - 1;
  EXPECT_TRUE(has(m.top, top_right) && has(m.right, top_right));
}

TEST(StructuredMesh, MinimumEdgeAndAngle) {
  for (std::size_t n : {2u, 9u, 100u}) {
    const Mesh m = build_structured_mesh(n);
    double shortest = 1.0;
    for (const auto& t : m.elements)
      for (int a = 0; a < 3; ++a) shortest = std::min(shortest, distance(m.nodes[t[a]], m.nodes[t[(a + 1) % 3]]));
    EXPECT_NEAR(m.h, shortest, 1e-14);
    EXPECT_NEAR(m.h, std::sqrt(2.0) / (2.0 * static_cast<double>(n)), 1e-15);
    EXPECT_GE(min_angle_degrees(m), 30.0);
    EXPECT_NEAR(min_angle_degrees(m), 45.0, 1e-9);
  }
}

TEST(StructuredMesh, GradientsReproduceLinearField) {
  const Mesh m = build_structured_mesh(5);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    const auto& g = m.geometry[e];
    double gx = 0.0, gy = 0.0, sx = 0.0, sy = 0.0;
    for (int a = 0; a < 3; ++a) {
      const Point p = m.nodes[m.elements[e][a]];
      const double f = 2.0 - 3.0 * p.x + 0.5 * p.y;
      gx += g.dndx[a] * f;
      gy += g.dndy[a] * f;
      sx += g.dndx[a];
      sy += g.dndy[a];
    }
    EXPECT_NEAR(gx, -3.0, 1e-12);
    EXPECT_NEAR(gy, 0.5, 1e-12);
    EXPECT_NEAR(sx, 0.0, 1e-12);
    EXPECT_NEAR(sy, 0.0, 1e-12);
  }
}

TEST(Interpolate, ConstantField) {
  const Mesh m = build_structured_mesh(8);
  const std::vector<double> f(m.num_nodes(), 5.0);
  for (Point x : {Point{0.0, 0.0}, Point{1.0, 1.0}, Point{0.3, 0.71}, Point{0.5, 0.5}})
    EXPECT_NEAR(interpolate(m, f, x), 5.0, 1e-14);
}

TEST(Interpolate, LinearFieldIsExact) {
  const Mesh m = build_structured_mesh(11);
  std::vector<double> f(m.num_nodes());
  auto lin = [](Point p) { return 0.7 + 1.3 * p.x - 2.1 * p.y; };
  for (std::size_t k = 0; k < m.num_nodes(); ++k) f[k] = lin(m.nodes[k]);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Point x{u(rng), u(rng)};
    EXPECT_NEAR(interpolate(m, f, x), lin(x), 1e-12);
  }
}

TEST(Interpolate, WeightsFormPartitionOfUnityAndContainPoint) {
  const Mesh m = build_structured_mesh(13);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Point x{u(rng), u(rng)};
    const Location loc = locate(m, x);
    EXPECT_NEAR(loc.weights[0] + loc.weights[1] + loc.weights[2], 1.0, 1e-14);
    for (double w : loc.weights) EXPECT_GE(w, -1e-12);
  }
}

TEST(Interpolate, LatticeNodesAndEdgesResolve) {
  const Mesh m = build_structured_mesh(4);
  std::vector<double> f(m.num_nodes());
  for (std::size_t k = 0; k < m.num_nodes(); ++k) f[k] = static_cast<double>(k);
  for (std::size_t k = 0; k < m.num_nodes(); ++k) EXPECT_NEAR(interpolate(m, f, m.nodes[k]), f[k], 1e-12);
  // a point on the diagonal shared by two elements goes to the lower index
  const Location loc = locate(m, {0.0625 - 0.01, 0.0625 - 0.01});
  EXPECT_EQ(loc.element, 0u);
}

TEST(Interpolate, OutsideDomain) {
  const Mesh m = build_structured_mesh(4);
  const std::vector<double> f(m.num_nodes(), 0.0);
  EXPECT_CRACKPATH_ERROR(interpolate(m, f, {1.5, 0.5}), ErrorCode::OutOfDomain);
  EXPECT_CRACKPATH_ERROR(interpolate(m, f, {0.5, -1e-9}), ErrorCode::OutOfDomain);
  EXPECT_NO_THROW(interpolate(m, f, {1.0 + 1e-13, 0.5}));
}

TEST(Quadrature, PointsLieInsideAndIntegrateQuadraticsExactly) {
  const Mesh m = build_structured_mesh(3);
  double integral = 0.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e)
    for (std::size_t q = 0; q < TriangleRule::size; ++q) {
      const Point p = quadrature_point(m, e, q);
      integral += TriangleRule::weight * m.geometry[e].area * (p.x * p.x + p.x * p.y);
    }
  EXPECT_NEAR(integral, 1.0 / 3.0 + 1.0 / 4.0, 1e-14);
}

TEST(MeshFromTriangles, UsesGivenTopology) {
  const Mesh m = mesh_from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  EXPECT_EQ(m.num_elements(), 1u);
  EXPECT_NEAR(m.geometry[0].area, 0.5, 1e-15);
  EXPECT_NEAR(m.h, 1.0, 1e-15);
}

TEST(MeshOff, HeaderCounts) {
  const std::string off = mesh_to_off(build_structured_mesh(2));
  EXPECT_EQ(off.rfind("OFF\n13 16 0\n", 0), 0u);
}
