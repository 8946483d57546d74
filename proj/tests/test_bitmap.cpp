#include <gtest/gtest.h>

#include <random>

#include "crackpath/bitmap.hpp"
#include "support.hpp"

using namespace crackpath;

namespace {

std::vector<std::uint8_t> idx_header(std::uint32_t magic, std::uint32_t n, std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::uint8_t> out;
  for (std::uint32_t v : {magic, n, rows, cols}) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

}  // namespace

TEST(Idx, DecodesSmallImage) {
  auto bytes = idx_header(0x803, 1, 2, 2);
  bytes.insert(bytes.end(), {0, 10, 20, 255});
  const auto grids = parse_idx(bytes);
  ASSERT_EQ(grids.size(), 1u);
  EXPECT_EQ(grids[0].width, 2u);
  EXPECT_EQ(grids[0].height, 2u);
  EXPECT_EQ(grids[0].at(0, 0), 0);
  EXPECT_EQ(grids[0].at(0, 1), 10);
  EXPECT_EQ(grids[0].at(1, 0), 20);
  EXPECT_EQ(grids[0].at(1, 1), 255);
}

TEST(Idx, EmptyInputIsTruncated) { EXPECT_CRACKPATH_ERROR(parse_idx({}), ErrorCode::Truncated); }

TEST(Idx, LabelFileMagicRejected) {
  auto bytes = idx_header(0x801, 1, 2, 2);
  bytes.insert(bytes.end(), {0, 0, 0, 0});
  EXPECT_CRACKPATH_ERROR(parse_idx(bytes), ErrorCode::BadMagic);
}

TEST(Idx, ShortPayloadIsTruncated) {
  auto bytes = idx_header(0x803, 2, 2, 2);
  bytes.insert(bytes.end(), {1, 2, 3, 4, 5, 6, 7});
  EXPECT_CRACKPATH_ERROR(parse_idx(bytes), ErrorCode::Truncated);
}

TEST(Idx, ShortHeaderIsTruncated) {
  auto bytes = idx_header(0x803, 1, 2, 2);
  bytes.resize(10);
  EXPECT_CRACKPATH_ERROR(parse_idx(bytes), ErrorCode::Truncated);
}

TEST(Idx, RoundTripIsByteIdentical) {
  std::mt19937 rng(7);
  auto bytes = idx_header(0x803, 3, 28, 28);
  for (int k = 0; k < 3 * 28 * 28; ++k) bytes.push_back(static_cast<std::uint8_t>(rng()));
  const auto grids = parse_idx(bytes);
  ASSERT_EQ(grids.size(), 3u);
  EXPECT_EQ(serialize_idx(grids), bytes);
}

TEST(Idx, FileRoundTrip) {
  testutil::TempDir dir("idx");
  std::vector<IntensityGrid> grids(2, IntensityGrid(28, 28));
  grids[1].at(5, 6) = 99;
  write_idx_file(dir.path() / "a.idx", grids);
  EXPECT_EQ(read_idx_file(dir.path() / "a.idx"), grids);
}

TEST(ActivePixels, AllZeroGridHasNone) { EXPECT_TRUE(active_pixels(IntensityGrid(28, 28), 10).empty()); }

TEST(ActivePixels, StrictInequality) {
  IntensityGrid g(28, 28);
  g.at(3, 4) = 11;
  g.at(0, 0) = 10;
  const auto px = active_pixels(g, 10);
  ASSERT_EQ(px.size(), 1u);
  EXPECT_EQ(px[0], (PixelIndex{3, 4}));
}

TEST(ActivePixels, RowMajorOrder) {
  IntensityGrid g(4, 4);
  g.at(2, 1) = 50;
  g.at(0, 3) = 50;
  g.at(2, 0) = 50;
  const auto px = active_pixels(g, 10);
  ASSERT_EQ(px.size(), 3u);
  EXPECT_EQ(px[0], (PixelIndex{0, 3}));
  EXPECT_EQ(px[1], (PixelIndex{2, 0}));
  EXPECT_EQ(px[2], (PixelIndex{2, 1}));
}

TEST(ActivePixels, MonotoneInThreshold) {
  std::mt19937 rng(3);
  IntensityGrid g(28, 28);
  for (auto& v : g.values) v = static_cast<std::uint8_t>(rng());
  std::size_t previous = active_pixels(g, 0).size();
  for (int t = 1; t < 256; ++t) {
    const auto now = active_pixels(g, static_cast<std::uint8_t>(t)).size();
    EXPECT_LE(now, previous);
    previous = now;
  }
}

TEST(Pgm, RoundTrip) {
  IntensityGrid g(5, 3);
  for (std::size_t k = 0; k < g.values.size(); ++k) g.values[k] = static_cast<std::uint8_t>(k * 17);
  EXPECT_EQ(decode_pgm(encode_pgm(g)), g);
}

TEST(Pgm, HeaderLayout) {
  IntensityGrid g(2, 1, 7);
  const auto bytes = encode_pgm(g);
  const std::string text(bytes.begin(), bytes.end() - 2);
  EXPECT_EQ(text, "P5\n2 1\n255\n");
}

TEST(Pgm, RejectsAsciiVariant) {
  const std::string p2 = "P2\n1 1\n255\n0\n";
  EXPECT_CRACKPATH_ERROR(decode_pgm(std::vector<std::uint8_t>(p2.begin(), p2.end())), ErrorCode::BadMagic);
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary) {
  testutil::TempDir dir("atomic");
  const auto path = dir.path() / "f.txt";
  write_file_atomic(path, std::string_view("first"));
  write_file_atomic(path, std::string_view("second"));
  const auto bytes = read_file_bytes(path);
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1u);
}

TEST(ReadFile, MissingFileIsIoError) {
  EXPECT_CRACKPATH_ERROR(read_file_bytes("/nonexistent/crackpath/file"), ErrorCode::Io);
}
