#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace crackpath {

/// 8-bit grayscale image, row-major, row 0 is the top of the image.
struct IntensityGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> values;

  IntensityGrid() = default;
  IntensityGrid(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), values(w * h, fill) {}

  std::uint8_t at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
  std::uint8_t& at(std::size_t row, std::size_t col) { return values[row * width + col]; }

  bool operator==(const IntensityGrid&) const = default;
};

struct PixelIndex {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const PixelIndex&) const = default;
};

inline constexpr std::uint32_t kIdx3UbyteMagic = 0x00000803;
inline constexpr std::size_t kBitmapSide = 28;

/// Decodes an IDX3 unsigned-byte image file. Throws BadMagic for any other
/// IDX variant and Truncated when the payload is shorter than the header says.
std::vector<IntensityGrid> parse_idx(std::span<const std::uint8_t> bytes);

/// Inverse of parse_idx. All grids must share one shape.
std::vector<std::uint8_t> serialize_idx(std::span<const IntensityGrid> grids);

std::vector<IntensityGrid> read_idx_file(const std::filesystem::path& path);
void write_idx_file(const std::filesystem::path& path, std::span<const IntensityGrid> grids);

/// Pixels with value strictly greater than `threshold`, row-major order.
std::vector<PixelIndex> active_pixels(const IntensityGrid& grid, std::uint8_t threshold);

/// Binary PGM (P5, maxval 255).
std::vector<std::uint8_t> encode_pgm(const IntensityGrid& grid);
IntensityGrid decode_pgm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace crackpath
