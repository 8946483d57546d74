#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crackpath/geometry.hpp"

namespace crackpath {

/// Constant shape-function gradients of a linear triangle.
struct ElementGeometry {
  double area = 0.0;
  std::array<double, 3> dndx{};
  std::array<double, 3> dndy{};
};

/// Structured "crossed" triangulation of the unit square: every lattice cell
/// is split into four triangles through an added centroid node.
struct Mesh {
  std::size_t cells_per_side = 0;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> elements;  ///< counter-clockwise
  std::vector<ElementGeometry> geometry;
  double h = 0.0;  ///< minimum edge length

  std::vector<int> bottom;
  std::vector<int> top;
  std::vector<int> left;
  std::vector<int> right;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }

  /// Cell size 1/n.
  double spacing() const { return 1.0 / static_cast<double>(cells_per_side); }
};

Mesh build_structured_mesh(std::size_t n);

/// Unstructured mesh from explicit triangles. No boundary sets and no
/// lattice point location; intended for small hand-built test meshes.
Mesh mesh_from_triangles(std::vector<Point> nodes, std::vector<std::array<int, 3>> elements);

/// Minimum edge length of the crossed mesh with n cells per side.
double crossed_mesh_h(std::size_t n);

/// Signed area of a triangle (positive when counter-clockwise).
double signed_area(Point a, Point b, Point c);

struct Location {
  std::size_t element = 0;
  std::array<double, 3> weights{};
};

/// Constant-time point location on the lattice. Points on shared edges go to
/// the lower-numbered element. Throws OutOfDomain outside [0,1]^2 (1e-12 slack).
Location locate(const Mesh& mesh, Point x);

double interpolate(const Mesh& mesh, std::span<const double> nodal, Point x);

/// Gauss points of the 3-point rule on a triangle, in barycentric form.
/// Weights are fractions of the element area.
struct TriangleRule {
  static constexpr std::size_t size = 3;
  static constexpr std::array<std::array<double, 3>, 3> bary = {{
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
  }};
  static constexpr double weight = 1.0 / 3.0;
};

/// Physical coordinates of quadrature point q in element e.
Point quadrature_point(const Mesh& mesh, std::size_t e, std::size_t q);

/// Minimum interior angle in degrees over all elements.
double min_angle_degrees(const Mesh& mesh);

std::string mesh_to_off(const Mesh& mesh);

}  // namespace crackpath
