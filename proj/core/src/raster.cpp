#include "crackpath/raster.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fmt/format.h>

#include "crackpath/error.hpp"

namespace crackpath {

namespace {

constexpr std::size_t kHeaderSize = 8 + 4 + 1;

std::vector<std::uint8_t> header(std::size_t n, RasterDtype dtype, std::size_t payload) {
  std::vector<std::uint8_t> out(std::begin(kRasterMagic), std::end(kRasterMagic));
  out.reserve(kHeaderSize + payload);
  const auto side = static_cast<std::uint32_t>(n);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(side >> (8 * b)));
  out.push_back(static_cast<std::uint8_t>(dtype));
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_raster(const FieldRaster& raster) {
  auto out = header(raster.n, RasterDtype::F64, raster.values.size() * 8);
  for (double v : raster.values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

std::vector<std::uint8_t> encode_raster(const BinaryRaster& raster) {
  auto out = header(raster.n, RasterDtype::U8, raster.values.size());
  out.insert(out.end(), raster.values.begin(), raster.values.end());
  return out;
}

FieldRaster DecodedRaster::as_field() const {
  if (dtype == RasterDtype::F64) return f64;
  FieldRaster out(u8.n, u8.channel);
  std::transform(u8.values.begin(), u8.values.end(), out.values.begin(),
                 [](std::uint8_t v) { return static_cast<double>(v); });
  return out;
}

DecodedRaster decode_raster(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || !std::equal(std::begin(kRasterMagic), std::end(kRasterMagic), bytes.begin())) {
    throw Error(ErrorCode::BadMagic, "not a CRKFRG01 raster");
  }
  if (bytes.size() < kHeaderSize) throw Error(ErrorCode::Truncated, "raster header");
  std::uint32_t n = 0;
  for (int b = 0; b < 4; ++b) n |= std::uint32_t{bytes[8 + b]} << (8 * b);
  const std::uint8_t dtype = bytes[12];
  const auto payload = bytes.subspan(kHeaderSize);
  const std::size_t count = std::size_t{n} * n;

  DecodedRaster out;
  if (dtype == static_cast<std::uint8_t>(RasterDtype::F64)) {
    if (payload.size() < count * 8) throw Error(ErrorCode::Truncated, "f64 raster payload");
    out.dtype = RasterDtype::F64;
    out.f64 = FieldRaster(n, "");
    for (std::size_t k = 0; k < count; ++k) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= std::uint64_t{payload[k * 8 + b]} << (8 * b);
      out.f64.values[k] = std::bit_cast<double>(bits);
    }
  } else if (dtype == static_cast<std::uint8_t>(RasterDtype::U8)) {
    if (payload.size() < count) throw Error(ErrorCode::Truncated, "u8 raster payload");
    out.dtype = RasterDtype::U8;
    out.u8 = BinaryRaster(n, "");
    std::copy_n(payload.begin(), count, out.u8.values.begin());
  } else {
    throw Error(ErrorCode::BadMagic, "unknown raster dtype");
  }
  return out;
}

DecodedRaster read_raster_file(const std::filesystem::path& path) {
  return decode_raster(read_file_bytes(path));
}

BinaryRaster load_binary_raster(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  BinaryRaster out;
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    const auto grid = decode_pgm(bytes);
    if (grid.width != grid.height) throw Error(ErrorCode::ShapeMismatch, "crack rasters are square");
    out = BinaryRaster(grid.width, "damage");
    for (std::size_t k = 0; k < grid.values.size(); ++k) out.values[k] = grid.values[k] != 0 ? 1 : 0;
    return out;
  }
  const auto decoded = decode_raster(bytes);
  if (decoded.dtype == RasterDtype::U8) {
    out = decoded.u8;
    for (auto& v : out.values) v = v != 0 ? 1 : 0;
  } else {
    out = BinaryRaster(decoded.f64.n, "damage");
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = decoded.f64.values[k] != 0.0 ? 1 : 0;
  }
  return out;
}

IntensityGrid to_intensity(const BinaryRaster& raster, std::uint8_t on_value) {
  IntensityGrid g(raster.n, raster.n);
  for (std::size_t k = 0; k < raster.values.size(); ++k) g.values[k] = raster.values[k] ? on_value : 0;
  return g;
}

std::string raster_to_csv(const FieldRaster& raster) {
  std::string out;
  for (std::size_t i = 0; i < raster.n; ++i) {
    for (std::size_t j = 0; j < raster.n; ++j) {
      if (j) out += ',';
      out += fmt::format("{:.17g}", raster.at(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace crackpath
