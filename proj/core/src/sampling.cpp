#include "crackpath/sampling.hpp"

#include "crackpath/error.hpp"

namespace crackpath {

namespace {

std::string fmt_component_name(Axis axis, Axis component) {
  const char row = component == Axis::X ? '1' : '2';
  const char col = axis == Axis::X ? '1' : '2';
  return std::string("F") + row + col;
}

}  // namespace

FieldRaster sample_to_raster(const Mesh& mesh, std::span<const double> nodal, std::size_t n, std::string channel) {
  if (n < 1) throw Error(ErrorCode::InvalidResolution, "raster resolution must be positive");
  FieldRaster out(n, std::move(channel));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = interpolate(mesh, nodal, cell_center(n, i, j));
  }
  return out;
}

std::vector<double> displacement_component(std::span<const double> u, int component) {
  std::vector<double> out(u.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = u[2 * k + component];
  return out;
}

BinaryRaster binarize(const FieldRaster& raster, double threshold) {
  BinaryRaster out(raster.n, raster.channel);
  for (std::size_t k = 0; k < raster.values.size(); ++k) out.values[k] = raster.values[k] > threshold ? 1 : 0;
  return out;
}

BinaryRaster binarize(const BinaryRaster& raster, double threshold) {
  BinaryRaster out(raster.n, raster.channel);
  for (std::size_t k = 0; k < raster.values.size(); ++k) {
    out.values[k] = static_cast<double>(raster.values[k]) > threshold ? 1 : 0;
  }
  return out;
}

std::vector<double> spline_derivative(std::span<const double> y, double h, SplineEnds ends) {
  const std::size_t n = y.size();
  if (n < 4) throw Error(ErrorCode::TooFewSamples, "cubic spline needs at least 4 samples");

  // Second derivatives M at the knots. Interior rows read
  // M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2.
  // Natural ends pin M_0 = M_{n-1} = 0. Not-a-knot ends match the third
  // derivative across knots 1 and n-2, i.e. M_0 = 2 M_1 - M_2, which turns the
  // first interior row into 6 M_1 = rhs_1 (and symmetrically at the far end).
  const std::size_t m = n - 2;
  std::vector<double> sub(m, 1.0), diag(m, 4.0), sup(m, 1.0), rhs(m);
  for (std::size_t k = 0; k < m; ++k) rhs[k] = 6.0 * (y[k + 2] - 2.0 * y[k + 1] + y[k]) / (h * h);
  if (ends == SplineEnds::NotAKnot) {
    diag.front() = 6.0;
    sup.front() = 0.0;
    diag.back() = 6.0;
    sub.back() = 0.0;
  }
  for (std::size_t k = 1; k < m; ++k) {
    const double w = sub[k] / diag[k - 1];
    diag[k] -= w * sup[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  std::vector<double> M(n, 0.0);
  for (std::size_t k = m; k-- > 0;) M[k + 1] = (rhs[k] - (k + 1 < m ? sup[k] * M[k + 2] : 0.0)) / diag[k];
  if (ends == SplineEnds::NotAKnot) {
    M[0] = 2.0 * M[1] - M[2];
    M[n - 1] = 2.0 * M[n - 2] - M[n - 3];
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out[i] = (y[i + 1] - y[i]) / h - h * (2.0 * M[i] + M[i + 1]) / 6.0;
  }
  out[n - 1] = (y[n - 1] - y[n - 2]) / h + h * (M[n - 2] + 2.0 * M[n - 1]) / 6.0;
  return out;
}

FieldRaster spline_gradient(const FieldRaster& field, double spacing, Axis axis, SplineEnds ends) {
  const std::size_t n = field.n;
  if (n < 4) throw Error(ErrorCode::TooFewSamples, "cubic spline needs at least 4 samples");
  FieldRaster out(n, field.channel + (axis == Axis::X ? "_dx" : "_dy"));
  std::vector<double> line(n);
  for (std::size_t a = 0; a < n; ++a) {
    if (axis == Axis::X) {
      for (std::size_t j = 0; j < n; ++j) line[j] = field.at(a, j);
      const auto d = spline_derivative(line, spacing, ends);
      for (std::size_t j = 0; j < n; ++j) out.at(a, j) = d[j];
    } else {
      // increasing y is decreasing row index
      for (std::size_t k = 0; k < n; ++k) line[k] = field.at(n - 1 - k, a);
      const auto d = spline_derivative(line, spacing, ends);
      for (std::size_t k = 0; k < n; ++k) out.at(n - 1 - k, a) = d[k];
    }
  }
  return out;
}

FieldRaster spline_deformation_gradient(const FieldRaster& displacement, double spacing, Axis axis,
                                        Axis displacement_component, SplineEnds ends) {
  auto out = spline_gradient(displacement, spacing, axis, ends);
  if (axis == displacement_component) {
    for (auto& v : out.values) v += 1.0;
  }
  out.channel = fmt_component_name(axis, displacement_component);
  return out;
}

}  // namespace crackpath
