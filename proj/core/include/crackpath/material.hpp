#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "crackpath/bitmap.hpp"
#include "crackpath/geometry.hpp"
#include "crackpath/raster.hpp"

namespace crackpath {

struct MaterialGenParams {
  double pixel_subregion_fraction = 0.6;
  double min_center_distance = 0.0525;
  std::uint8_t intensity_threshold = 10;
  int max_rejection_attempts = 100;
  std::uint64_t seed = 0;
};

/// Background material constants. Stiffness, toughness and strength are all
/// scaled pointwise by the same rigidity ratio.
struct BackgroundMaterial {
  double E0 = 210000.0;
  double Gf = 2.7;
  double ft = 2445.42;

  bool operator==(const BackgroundMaterial&) const = default;
};

/// Inclusion centres plus the parameters of the rigidity-ratio field
///   r(x) = 1 + cap                                   if d < d_min
///   r(x) = 1 + cap d_min^2 / (beta d_min^2 + (1 - beta) d^2)  otherwise
/// where d is the smooth minimum of the distances from x to every centre.
struct MaterialField {
  std::vector<Point> centers;
  double alpha_smoothmin = -100.0;
  double beta = 0.9;
  double d_min = 0.0075;
  double ratio_cap = 3.0;
  BackgroundMaterial background;

  bool homogeneous() const { return centers.empty(); }

  /// r(x), with the empty-field case treated as homogeneous (r = 1).
  double ratio_at(Point x) const;

  bool operator==(const MaterialField&) const = default;
};

/// Exponentially weighted mean  sum x_i e^{a x_i} / sum e^{a x_i}, a < 0.
/// Exponents are shifted by a * min(x) so nothing overflows.
double smooth_min(std::span<const double> values, double alpha);

/// Throws NoInclusions for an empty field.
double rigidity_ratio(Point x, const MaterialField& field);

/// Rigidity ratio as a function of the smoothed distance alone.
double rigidity_from_distance(double d, const MaterialField& field);

struct InclusionPlacement {
  MaterialField field;
  std::vector<PixelIndex> skipped;  ///< pixels whose candidates never cleared the distance limit
};

/// One candidate centre per active pixel, drawn uniformly in the centred
/// sub-square of side fraction/side. Pixels are visited row-major; a pixel
/// whose candidate stays too close to an accepted centre after
/// max_rejection_attempts draws is skipped and logged.
InclusionPlacement place_inclusions(const IntensityGrid& grid, const MaterialGenParams& params);

/// Rigidity ratio evaluated at the n x n cell centres. Empty fields give 1.
FieldRaster rasterize_rigidity(const MaterialField& field, std::size_t n);

/// Generator for one sample, keyed by (dataset seed, sample index).
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);
std::uint64_t sample_seed(std::uint64_t dataset_seed, std::uint64_t index);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string centers_to_csv(std::span<const Point> centers);
std::vector<Point> centers_from_csv(std::string_view text);

}  // namespace crackpath
