#include "crackpath/bitmap.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "crackpath/error.hpp"

namespace crackpath {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

std::vector<IntensityGrid> parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::Truncated, "IDX header needs at least 4 bytes");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdx3UbyteMagic) throw Error(ErrorCode::BadMagic, "expected IDX3 unsigned-byte magic 0x00000803");
  if (bytes.size() < 16) throw Error(ErrorCode::Truncated, "IDX3 header is 16 bytes");

  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  const std::size_t per_image = rows * cols;
  if (bytes.size() - 16 < count * per_image) {
    throw Error(ErrorCode::Truncated, "IDX3 payload shorter than header promises");
  }

  std::vector<IntensityGrid> grids;
  grids.reserve(count);
  auto cursor = bytes.begin() + 16;
  for (std::size_t i = 0; i < count; ++i) {
    IntensityGrid g;
    g.width = cols;
    g.height = rows;
    g.values.assign(cursor, cursor + static_cast<std::ptrdiff_t>(per_image));
    cursor += static_cast<std::ptrdiff_t>(per_image);
    grids.push_back(std::move(g));
  }
  return grids;
}

std::vector<std::uint8_t> serialize_idx(std::span<const IntensityGrid> grids) {
  const std::size_t rows = grids.empty() ? 0 : grids.front().height;
  const std::size_t cols = grids.empty() ? 0 : grids.front().width;
  std::vector<std::uint8_t> out;
  out.reserve(16 + grids.size() * rows * cols);
  append_be32(out, kIdx3UbyteMagic);
  append_be32(out, static_cast<std::uint32_t>(grids.size()));
  append_be32(out, static_cast<std::uint32_t>(rows));
  append_be32(out, static_cast<std::uint32_t>(cols));
  for (const auto& g : grids) {
    if (g.height != rows || g.width != cols) {
      throw Error(ErrorCode::ShapeMismatch, "IDX files hold images of a single shape");
    }
    out.insert(out.end(), g.values.begin(), g.values.end());
  }
  return out;
}

std::vector<IntensityGrid> read_idx_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_idx(bytes);
}

void write_idx_file(const std::filesystem::path& path, std::span<const IntensityGrid> grids) {
  write_file_atomic(path, serialize_idx(grids));
}

std::vector<PixelIndex> active_pixels(const IntensityGrid& grid, std::uint8_t threshold) {
  std::vector<PixelIndex> out;
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) {
      if (grid.at(r, c) > threshold) out.push_back({r, c});
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_pgm(const IntensityGrid& grid) {
  const std::string header =
      "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), grid.values.begin(), grid.values.end());
  return out;
}

IntensityGrid decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> std::size_t {
    skip_space_and_comments();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw Error(ErrorCode::Truncated, "PGM header");
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::BadMagic, "only binary PGM (P5) is supported");
  }
  pos = 2;
  const std::size_t w = read_uint();
  const std::size_t h = read_uint();
  const std::size_t maxval = read_uint();
  if (maxval != 255) throw Error(ErrorCode::BadMagic, "PGM maxval must be 255");
  ++pos;  // single whitespace byte before the raster
  if (bytes.size() < pos || bytes.size() - pos < w * h) throw Error(ErrorCode::Truncated, "PGM raster");

  IntensityGrid g(w, h);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), w * h, g.values.begin());
  return g;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace crackpath
