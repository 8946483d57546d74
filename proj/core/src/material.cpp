#include "crackpath/material.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "crackpath/error.hpp"

namespace crackpath {

double smooth_min(std::span<const double> values, double alpha) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "smooth_min of no values");
  const double lo = *std::min_element(values.begin(), values.end());
  double num = 0.0;
  double den = 0.0;
  for (double v : values) {
    const double w = std::exp(alpha * (v - lo));
    num += v * w;
    den += w;
  }
  return num / den;
}

double rigidity_from_distance(double d, const MaterialField& field) {
  if (d < field.d_min) return 1.0 + field.ratio_cap;
  const double dm2 = field.d_min * field.d_min;
  return 1.0 + field.ratio_cap * dm2 / (field.beta * dm2 + (1.0 - field.beta) * d * d);
}

double rigidity_ratio(Point x, const MaterialField& field) {
  if (field.centers.empty()) throw Error(ErrorCode::NoInclusions, "rigidity ratio needs at least one centre");
  thread_local std::vector<double> dist;
  dist.resize(field.centers.size());
  std::transform(field.centers.begin(), field.centers.end(), dist.begin(),
                 [x](Point c) { return distance(x, c); });
  return rigidity_from_distance(smooth_min(dist, field.alpha_smoothmin), field);
}

double MaterialField::ratio_at(Point x) const {
  return centers.empty() ? 1.0 : rigidity_ratio(x, *this);
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t dataset_seed, std::uint64_t index) {
  return splitmix64(splitmix64(dataset_seed) + index * 0xd1b54a32d192ed03ULL);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(sample_seed(seed, index));
}

InclusionPlacement place_inclusions(const IntensityGrid& grid, const MaterialGenParams& params) {
  if (!(params.min_center_distance > 0.0) || !(params.pixel_subregion_fraction > 0.0) ||
      params.pixel_subregion_fraction > 1.0) {
    throw Error(ErrorCode::OutOfRange, "invalid inclusion placement parameters");
  }
  InclusionPlacement out;
  std::mt19937_64 rng(params.seed);
  const double pixel = 1.0 / static_cast<double>(grid.width);
  const double sub = params.pixel_subregion_fraction * pixel;
  const double limit2 = params.min_center_distance * params.min_center_distance;

  for (const auto px : active_pixels(grid, params.intensity_threshold)) {
    const double cx = (static_cast<double>(px.col) + 0.5) * pixel;
    const double cy = 1.0 - (static_cast<double>(px.row) + 0.5) * pixel;
    bool placed = false;
    for (int attempt = 0; attempt <= params.max_rejection_attempts && !placed; ++attempt) {
      const Point cand{cx + (uniform01(rng) - 0.5) * sub, cy + (uniform01(rng) - 0.5) * sub};
      const bool clear = std::none_of(out.field.centers.begin(), out.field.centers.end(), [&](Point c) {
        const double dx = c.x - cand.x;
        const double dy = c.y - cand.y;
        return dx * dx + dy * dy < limit2;
      });
      if (clear) {
        out.field.centers.push_back(cand);
        placed = true;
      }
    }
    if (!placed) out.skipped.push_back(px);
  }
  return out;
}

FieldRaster rasterize_rigidity(const MaterialField& field, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidResolution, "raster resolution must be positive");
  FieldRaster out(n, "rigidity", 1.0);
  if (field.centers.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = rigidity_ratio(cell_center(n, i, j), field);
  }
  return out;
}

std::string centers_to_csv(std::span<const Point> centers) {
  std::string out;
  for (const auto& c : centers) out += fmt::format("{:.17g},{:.17g}\n", c.x, c.y);
  return out;
}

std::vector<Point> centers_from_csv(std::string_view text) {
  std::vector<Point> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::BadConfig, "centre line needs x,y");
    Point p;
    auto parse = [](std::string_view s, double& v) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::BadConfig, "bad number in centres CSV");
      }
    };
    parse(line.substr(0, comma), p.x);
    parse(line.substr(comma + 1), p.y);
    out.push_back(p);
  }
  return out;
}

}  // namespace crackpath
