#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "crackpath/sampling.hpp"
#include "support.hpp"

using namespace crackpath;

namespace {

FieldRaster raster_of(std::size_t n, auto f) {
  FieldRaster r(n, "test");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.at(i, j) = f(cell_center(n, i, j));
  return r;
}

}  // namespace

TEST(SampleToRaster, ConstantAndLinearFields) {
  const Mesh m = build_structured_mesh(9);
  std::vector<double> c(m.num_nodes(), 2.5), lin(m.num_nodes());
  for (std::size_t k = 0; k < m.num_nodes(); ++k) lin[k] = 1.0 - 2.0 * m.nodes[k].x + 0.25 * m.nodes[k].y;
  const auto rc = sample_to_raster(m, c, 17);
  for (double v : rc.values) EXPECT_NEAR(v, 2.5, 1e-14);
  const auto rl = sample_to_raster(m, lin, 23, "phi");
  EXPECT_EQ(rl.channel, "phi");
  for (std::size_t i = 0; i < 23; ++i)
    for (std::size_t j = 0; j < 23; ++j) {
      const Point p = cell_center(23, i, j);
      EXPECT_NEAR(rl.at(i, j), 1.0 - 2.0 * p.x + 0.25 * p.y, 1e-12);
    }
}

TEST(SampleToRaster, SingleCellIsDomainCentre) {
  const Mesh m = build_structured_mesh(4);
  std::vector<double> f(m.num_nodes());
  for (std::size_t k = 0; k < m.num_nodes(); ++k) f[k] = m.nodes[k].x + 10 * m.nodes[k].y;
  const auto r = sample_to_raster(m, f, 1);
  ASSERT_EQ(r.values.size(), 1u);
  EXPECT_NEAR(r.values[0], 5.5, 1e-12);
}

TEST(SampleToRaster, TopRowIsTopOfDomain) {
  const Mesh m = build_structured_mesh(4);
  std::vector<double> f(m.num_nodes());
  for (std::size_t k = 0; k < m.num_nodes(); ++k) f[k] = m.nodes[k].y;
  const auto r = sample_to_raster(m, f, 8);
  EXPECT_GT(r.at(0, 0), r.at(7, 0));
}

TEST(SampleToRaster, RejectsZeroResolution) {
  const Mesh m = build_structured_mesh(4);
  EXPECT_CRACKPATH_ERROR(sample_to_raster(m, std::vector<double>(m.num_nodes()), 0), ErrorCode::InvalidResolution);
}

TEST(DisplacementComponent, Deinterleaves) {
  const std::vector<double> u{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(displacement_component(u, 0), (std::vector<double>{1, 3, 5}));
  EXPECT_EQ(displacement_component(u, 1), (std::vector<double>{2, 4, 6}));
}

TEST(Binarize, StrictThreshold) {
  FieldRaster r(2, "phi");
  r.values = {0.5, 0.6, 0.4999, 0.5000001};
  EXPECT_EQ(binarize(r).values, (std::vector<std::uint8_t>{0, 1, 0, 1}));
  FieldRaster all(3, "phi", 0.6);
  for (auto v : binarize(all).values) EXPECT_EQ(v, 1);
}

TEST(SplineDerivative, LinearIsExact) {
  std::vector<double> s(12);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = 3.0 - 0.7 * 0.1 * static_cast<double>(k);
  for (auto ends : {SplineEnds::NotAKnot, SplineEnds::Natural})
    for (double d : spline_derivative(s, 0.1, ends)) EXPECT_NEAR(d, -0.7, 1e-10);
}

TEST(SplineDerivative, TooFewSamples) {
  EXPECT_CRACKPATH_ERROR(spline_derivative(std::vector<double>{1, 2, 3}, 1.0), ErrorCode::TooFewSamples);
}

TEST(SplineDerivative, CubicReproducedWithNotAKnotEnds) {
  for (std::size_t n : {4u, 5u, 28u}) {
    const double h = 1.0 / static_cast<double>(n - 1);
    std::vector<double> s(n);
    auto x = [&](std::size_t k) { return h * static_cast<double>(k); };
    for (std::size_t k = 0; k < n; ++k) s[k] = 1.0 - x(k) + 2.0 * x(k) * x(k) - 0.5 * std::pow(x(k), 3);
    const auto d = spline_derivative(s, h);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(d[k], -1.0 + 4.0 * x(k) - 1.5 * x(k) * x(k), 1e-10);
  }
}

TEST(SplineDerivative, QuadraticOnTwentyEightSamples) {
  const std::size_t n = 28;
  const double h = 1.0 / (n - 1);
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = std::pow(h * static_cast<double>(k), 2);
  const auto d = spline_derivative(s, h);
  for (std::size_t k = 1; k + 1 < n; ++k) EXPECT_NEAR(d[k], 2 * h * static_cast<double>(k), 1e-6);
  EXPECT_NEAR(d.front(), 0.0, 1e-3);
  EXPECT_NEAR(d.back(), 2.0, 1e-3);
}

TEST(SplineDerivative, NaturalEndsDecayIntoInterior) {
  const std::size_t n = 28;
  const double h = 1.0 / (n - 1);
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = std::pow(h * static_cast<double>(k), 2);
  const auto d = spline_derivative(s, h, SplineEnds::Natural);
  // zero end curvature against a true value of 2 leaves an error of h / sqrt(3)
  EXPECT_NEAR(std::abs(d.front()), h / std::sqrt(3.0), 1e-3 * h);
  std::vector<double> err(n);
  for (std::size_t k = 0; k < n; ++k) err[k] = std::abs(d[k] - 2 * h * static_cast<double>(k));
  for (std::size_t k = 1; k < 10; ++k) EXPECT_LT(err[k], 0.3 * err[k - 1]);
  EXPECT_LT(err[n / 2], 1e-6);
}

TEST(SplineDerivative, Sinusoid) {
  const std::size_t n = 28;
  const double h = 1.0 / (n - 1);
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = std::sin(2 * std::numbers::pi * h * static_cast<double>(k));
  const auto d = spline_derivative(s, h);
  for (std::size_t k = 1; k + 1 < n; ++k)
    EXPECT_NEAR(d[k], 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * h * static_cast<double>(k)), 1e-2);
}

TEST(SplineGradient, AxesAndOrientation) {
  const std::size_t n = 16;
  const auto f = raster_of(n, [](Point p) { return 2.0 * p.x - 3.0 * p.y; });
  const double spacing = 1.0 / n;
  for (double v : spline_gradient(f, spacing, Axis::X).values) EXPECT_NEAR(v, 2.0, 1e-10);
  for (double v : spline_gradient(f, spacing, Axis::Y).values) EXPECT_NEAR(v, -3.0, 1e-10);
}

TEST(SplineDeformationGradient, AddsIdentityOnDiagonal) {
  const std::size_t n = 20;
  const double spacing = 1.0 / n;
  const auto ux = raster_of(n, [](Point p) { return 0.5 * p.x; });
  for (double v : spline_deformation_gradient(ux, spacing, Axis::X, Axis::X).values) EXPECT_NEAR(v, 1.5, 1e-10);
  for (double v : spline_deformation_gradient(ux, spacing, Axis::Y, Axis::X).values) EXPECT_NEAR(v, 0.0, 1e-10);
  const auto uy = raster_of(n, [](Point p) { return 0.25 * p.y + 0.1 * p.x; });
  for (double v : spline_deformation_gradient(uy, spacing, Axis::Y, Axis::Y).values) EXPECT_NEAR(v, 1.25, 1e-10);
  for (double v : spline_deformation_gradient(uy, spacing, Axis::X, Axis::Y).values) EXPECT_NEAR(v, 0.1, 1e-10);
}
