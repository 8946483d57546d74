#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crackpath/bitmap.hpp"
#include "crackpath/geometry.hpp"

namespace crackpath {

/// Square n x n field sampled at cell centres. Cell (i, j) sits at
/// ((j + 0.5) / n, 1 - (i + 0.5) / n), so row 0 is the top of the domain.
template <typename T>
struct Raster {
  std::size_t n = 0;
  std::string channel;
  std::vector<T> values;

  Raster() = default;
  Raster(std::size_t side, std::string name, T fill = T{})
      : n(side), channel(std::move(name)), values(side * side, fill) {}

  T at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  T& at(std::size_t i, std::size_t j) { return values[i * n + j]; }

  bool operator==(const Raster&) const = default;
};

using FieldRaster = Raster<double>;
using BinaryRaster = Raster<std::uint8_t>;

inline Point cell_center(std::size_t n, std::size_t i, std::size_t j) {
  const double inv = 1.0 / static_cast<double>(n);
  return {(static_cast<double>(j) + 0.5) * inv, 1.0 - (static_cast<double>(i) + 0.5) * inv};
}

// CRKFRG01 container: 8-byte ASCII magic, u32 little-endian side length,
// u8 dtype (0 = f64, 1 = u8), then n*n row-major values (f64 little-endian).
inline constexpr char kRasterMagic[8] = {'C', 'R', 'K', 'F', 'R', 'G', '0', '1'};
enum class RasterDtype : std::uint8_t { F64 = 0, U8 = 1 };

std::vector<std::uint8_t> encode_raster(const FieldRaster& raster);
std::vector<std::uint8_t> encode_raster(const BinaryRaster& raster);

/// A decoded container; exactly one of the two members is populated,
/// according to `dtype`.
struct DecodedRaster {
  RasterDtype dtype = RasterDtype::F64;
  FieldRaster f64;
  BinaryRaster u8;

  /// Values as doubles regardless of storage type.
  FieldRaster as_field() const;
};

DecodedRaster decode_raster(std::span<const std::uint8_t> bytes);
DecodedRaster read_raster_file(const std::filesystem::path& path);

/// Loads a binary crack raster from either a CRKFRG01 container or a PGM;
/// nonzero pixels are 1.
BinaryRaster load_binary_raster(const std::filesystem::path& path);

IntensityGrid to_intensity(const BinaryRaster& raster, std::uint8_t on_value = 255);
std::string raster_to_csv(const FieldRaster& raster);

}  // namespace crackpath
