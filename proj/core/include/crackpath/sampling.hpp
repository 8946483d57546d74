#pragma once

#include <span>
#include <string>
#include <vector>

#include "crackpath/mesh.hpp"
#include "crackpath/raster.hpp"

namespace crackpath {

/// Linear interpolation of a nodal field at the n x n cell centres.
FieldRaster sample_to_raster(const Mesh& mesh, std::span<const double> nodal, std::size_t n,
                             std::string channel = "field");

/// One displacement component of an interleaved (u_x, u_y) nodal vector.
std::vector<double> displacement_component(std::span<const double> u, int component);

/// 1 where value > threshold (strict), else 0.
BinaryRaster binarize(const FieldRaster& raster, double threshold = 0.5);
BinaryRaster binarize(const BinaryRaster& raster, double threshold = 0.5);

enum class Axis { X, Y };

enum class SplineEnds { NotAKnot, Natural };

/// First derivative at the knots of the cubic spline through equally spaced
/// samples. Needs at least 4 samples. Not-a-knot ends reproduce cubics
/// exactly; natural ends (zero curvature) do not.
std::vector<double> spline_derivative(std::span<const double> samples, double spacing,
                                      SplineEnds ends = SplineEnds::NotAKnot);

/// Derivative of a raster along x (per row) or y (per column; rows run from
/// the top so the sign is flipped accordingly).
FieldRaster spline_gradient(const FieldRaster& field, double spacing, Axis axis,
                            SplineEnds ends = SplineEnds::NotAKnot);

/// Deformation-gradient component from a displacement raster: the spline
/// derivative, plus one on the diagonal (u_x along x, u_y along y).
FieldRaster spline_deformation_gradient(const FieldRaster& displacement, double spacing, Axis axis,
                                        Axis displacement_component, SplineEnds ends = SplineEnds::NotAKnot);

}  // namespace crackpath
