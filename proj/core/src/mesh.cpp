#include "crackpath/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "crackpath/error.hpp"

namespace crackpath {

namespace {

constexpr double kBoundaryTol = 1e-12;

ElementGeometry element_geometry(Point a, Point b, Point c) {
  ElementGeometry g;
  const double twice = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  g.area = 0.5 * twice;
  g.dndx = {(b.y - c.y) / twice, (c.y - a.y) / twice, (a.y - b.y) / twice};
  g.dndy = {(c.x - b.x) / twice, (a.x - c.x) / twice, (b.x - a.x) / twice};
  return g;
}

// Cell containing coordinate t; points on an interior cell edge go to the
// lower cell.
std::size_t cell_of(double t, std::size_t n) {
  const double s = t * static_cast<double>(n);
  const double c = std::ceil(s) - 1.0;
  return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(n - 1)));
}

}  // namespace

double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double crossed_mesh_h(std::size_t n) {
  const double dn = static_cast<double>(n);
  return std::min(1.0 / dn, std::numbers::sqrt2 / (2.0 * dn));
}

Mesh build_structured_mesh(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidResolution, "structured mesh needs n >= 2");
  Mesh m;
  m.cells_per_side = n;
  const double dn = static_cast<double>(n);
  const std::size_t side = n + 1;
  m.nodes.reserve(side * side + n * n);
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      m.nodes.push_back({static_cast<double>(i) / dn, static_cast<double>(j) / dn});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      m.nodes.push_back({(static_cast<double>(i) + 0.5) / dn, (static_cast<double>(j) + 0.5) / dn});
    }
  }

  auto lattice = [side](std::size_t i, std::size_t j) { return static_cast<int>(j * side + i); };
  m.elements.reserve(4 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const int v00 = lattice(i, j);
      const int v10 = lattice(i + 1, j);
      const int v11 = lattice(i + 1, j + 1);
      const int v01 = lattice(i, j + 1);
      const int c = static_cast<int>(side * side + j * n + i);
      m.elements.push_back({v00, v10, c});  // bottom
      m.elements.push_back({v10, v11, c});  // right
      m.elements.push_back({v11, v01, c});  // top
      m.elements.push_back({v01, v00, c});  // left
    }
  }

  m.geometry.reserve(m.elements.size());
  for (const auto& e : m.elements) {
    m.geometry.push_back(element_geometry(m.nodes[e[0]], m.nodes[e[1]], m.nodes[e[2]]));
  }
  m.h = crossed_mesh_h(n);

  for (std::size_t k = 0; k < m.nodes.size(); ++k) {
    const auto p = m.nodes[k];
    const int id = static_cast<int>(k);
    if (std::abs(p.y) <= kBoundaryTol) m.bottom.push_back(id);
    if (std::abs(p.y - 1.0) <= kBoundaryTol) m.top.push_back(id);
    if (std::abs(p.x) <= kBoundaryTol) m.left.push_back(id);
    if (std::abs(p.x - 1.0) <= kBoundaryTol) m.right.push_back(id);
  }
  return m;
}

Mesh mesh_from_triangles(std::vector<Point> nodes, std::vector<std::array<int, 3>> elements) {
  Mesh m;
  m.nodes = std::move(nodes);
  m.elements = std::move(elements);
  m.h = std::numeric_limits<double>::infinity();
  for (const auto& e : m.elements) {
    m.geometry.push_back(element_geometry(m.nodes[e[0]], m.nodes[e[1]], m.nodes[e[2]]));
    for (int a = 0; a < 3; ++a) m.h = std::min(m.h, distance(m.nodes[e[a]], m.nodes[e[(a + 1) % 3]]));
  }
  return m;
}

Location locate(const Mesh& mesh, Point x) {
  if (x.x < -kBoundaryTol || x.x > 1.0 + kBoundaryTol || x.y < -kBoundaryTol || x.y > 1.0 + kBoundaryTol) {
    throw Error(ErrorCode::OutOfDomain, fmt::format("point ({}, {}) outside the unit square", x.x, x.y));
  }
  const std::size_t n = mesh.cells_per_side;
  const std::size_t ci = cell_of(x.x, n);
  const std::size_t cj = cell_of(x.y, n);
  const double dn = static_cast<double>(n);
  const double dx = x.x * dn - (static_cast<double>(ci) + 0.5);
  const double dy = x.y * dn - (static_cast<double>(cj) + 0.5);

  std::size_t local = 3;
  if (dy <= -std::abs(dx)) {
    local = 0;
  } else if (dx >= std::abs(dy)) {
    local = 1;
  } else if (dy >= std::abs(dx)) {
    local = 2;
  }

  Location loc;
  loc.element = 4 * (cj * n + ci) + local;
  const auto& tri = mesh.elements[loc.element];
  const Point a = mesh.nodes[tri[0]];
  const Point b = mesh.nodes[tri[1]];
  const Point c = mesh.nodes[tri[2]];
  const double total = signed_area(a, b, c);
  loc.weights[0] = signed_area(x, b, c) / total;
  loc.weights[1] = signed_area(a, x, c) / total;
  loc.weights[2] = 1.0 - loc.weights[0] - loc.weights[1];
  return loc;
}

double interpolate(const Mesh& mesh, std::span<const double> nodal, Point x) {
  const auto loc = locate(mesh, x);
  const auto& tri = mesh.elements[loc.element];
  return loc.weights[0] * nodal[tri[0]] + loc.weights[1] * nodal[tri[1]] + loc.weights[2] * nodal[tri[2]];
}

Point quadrature_point(const Mesh& mesh, std::size_t e, std::size_t q) {
  const auto& tri = mesh.elements[e];
  const auto& w = TriangleRule::bary[q];
  Point p;
  for (int a = 0; a < 3; ++a) {
    p.x += w[a] * mesh.nodes[tri[a]].x;
    p.y += w[a] * mesh.nodes[tri[a]].y;
  }
  return p;
}

double min_angle_degrees(const Mesh& mesh) {
  double worst = 180.0;
  for (const auto& tri : mesh.elements) {
    for (int a = 0; a < 3; ++a) {
      const Point p = mesh.nodes[tri[a]];
      const Point u = mesh.nodes[tri[(a + 1) % 3]];
      const Point v = mesh.nodes[tri[(a + 2) % 3]];
      const double ux = u.x - p.x, uy = u.y - p.y, vx = v.x - p.x, vy = v.y - p.y;
      const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
      worst = std::min(worst, ang * 180.0 / std::numbers::pi);
    }
  }
  return worst;
}

std::string mesh_to_off(const Mesh& mesh) {
  std::string out = fmt::format("OFF\n{} {} 0\n", mesh.nodes.size(), mesh.elements.size());
  for (const auto& p : mesh.nodes) out += fmt::format("{:.17g} {:.17g} 0\n", p.x, p.y);
  for (const auto& e : mesh.elements) out += fmt::format("3 {} {} {}\n", e[0], e[1], e[2]);
  return out;
}

}  // namespace crackpath
