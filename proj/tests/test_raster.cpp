#include <gtest/gtest.h>

#include <cstring>

#include "crackpath/raster.hpp"
#include "support.hpp"

using namespace crackpath;
using crackpath::testutil::TempDir;

TEST(RasterContainer, FieldRoundTripIsBitExact) {
  FieldRaster r(3, "rigidity");
  for (std::size_t k = 0; k < 9; ++k) r.values[k] = 1.0 + 1.0 / (3.0 + static_cast<double>(k));
  r.values[4] = -0.0;
  const auto bytes = encode_raster(r);
  ASSERT_EQ(bytes.size(), 8u + 4u + 1u + 9u * 8u);
  EXPECT_EQ(std::memcmp(bytes.data(), "CRKFRG01", 8), 0);
  EXPECT_EQ(bytes[8], 3);
  EXPECT_EQ(bytes[12], 0);
  const auto back = decode_raster(bytes);
  EXPECT_EQ(back.dtype, RasterDtype::F64);
  ASSERT_EQ(back.f64.n, 3u);
  for (std::size_t k = 0; k < 9; ++k)
    EXPECT_EQ(std::memcmp(&back.f64.values[k], &r.values[k], sizeof(double)), 0);
  EXPECT_EQ(encode_raster(back.f64), bytes);
}

TEST(RasterContainer, BinaryRoundTrip) {
  BinaryRaster r(4, "damage");
  r.at(1, 2) = 1;
  r.at(3, 0) = 1;
  const auto bytes = encode_raster(r);
  EXPECT_EQ(bytes.size(), 13u + 16u);
  const auto back = decode_raster(bytes);
  EXPECT_EQ(back.dtype, RasterDtype::U8);
  EXPECT_EQ(back.u8.values, r.values);
  const auto as_field = back.as_field();
  EXPECT_EQ(as_field.at(1, 2), 1.0);
  EXPECT_EQ(as_field.at(0, 0), 0.0);
}

TEST(RasterContainer, RejectsCorruptInput) {
  auto bytes = encode_raster(BinaryRaster(4, "damage"));
  EXPECT_CRACKPATH_ERROR(decode_raster(std::span(bytes).first(20)), ErrorCode::Truncated);
  EXPECT_CRACKPATH_ERROR(decode_raster(std::span(bytes).first(10)), ErrorCode::Truncated);
  auto wrong_dtype = bytes;
  wrong_dtype[12] = 7;
  EXPECT_CRACKPATH_ERROR(decode_raster(wrong_dtype), ErrorCode::BadMagic);
  bytes[0] = 'X';
  EXPECT_CRACKPATH_ERROR(decode_raster(bytes), ErrorCode::BadMagic);
}

TEST(RasterContainer, BinaryLoaderAcceptsBothFormats) {
  TempDir dir("raster");
  BinaryRaster r(3, "damage");
  r.at(0, 0) = 1;
  r.at(2, 1) = 1;
  write_file_atomic(dir.path() / "a.crk", encode_raster(r));
  write_file_atomic(dir.path() / "a.pgm", encode_pgm(to_intensity(r)));
  EXPECT_EQ(load_binary_raster(dir.path() / "a.crk").values, r.values);
  EXPECT_EQ(load_binary_raster(dir.path() / "a.pgm").values, r.values);
  EXPECT_EQ(to_intensity(r).at(2, 1), 255);
  EXPECT_EQ(to_intensity(r, 1).at(2, 1), 1);
}

TEST(RasterContainer, CsvRows) {
  FieldRaster r(2, "x");
  r.values = {0.5, 1.0, 0.1, 2.0};
  EXPECT_EQ(raster_to_csv(r), "0.5,1\n0.10000000000000001,2\n");
}

TEST(RasterContainer, CellCentresRunFromTop) {
  EXPECT_EQ(cell_center(4, 0, 0), (Point{0.125, 0.875}));
  EXPECT_EQ(cell_center(4, 3, 3), (Point{0.875, 0.125}));
}
