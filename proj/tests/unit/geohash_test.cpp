#include "geomsg/geo/geohash.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "geomsg/error.hpp"
#include "support/geohash_oracle.hpp"

namespace geomsg::geo {
namespace {

Errc error_code(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected geomsg::Error";
  return Errc::validation;
}

TEST(GeohashEncode, OriginLengthOne) {
  EXPECT_EQ(geohash_encode(GeoPoint(0.0, 0.0), 1).code(), "s");
}

TEST(GeohashEncode, ReferencePoint) {
  EXPECT_EQ(geohash_encode(GeoPoint(57.64911, 10.40744), 11).code(), "u4pruydqqvj");
  EXPECT_EQ(testing::oracle_geohash(57.64911, 10.40744, 11), "u4pruydqqvj");
}

TEST(GeohashEncode, UpperCornerIsAllOnes) {
  EXPECT_EQ(geohash_encode(GeoPoint(90.0, 180.0), 1).code(), "z");
  EXPECT_EQ(geohash_encode(GeoPoint(90.0, 180.0), 12).code(), "zzzzzzzzzzzz");
  EXPECT_EQ(geohash_encode(GeoPoint(-90.0, -180.0), 12).code(), "000000000000");
}

TEST(GeohashEncode, RejectsBadLength) {
  EXPECT_EQ(error_code([] { geohash_encode(GeoPoint(0, 0), 0); }), Errc::validation);
  EXPECT_EQ(error_code([] { geohash_encode(GeoPoint(0, 0), 13); }), Errc::validation);
}

TEST(GeoPoint, RejectsOutOfRange) {
  EXPECT_EQ(error_code([] { GeoPoint(90.5, 0); }), Errc::validation);
  EXPECT_EQ(error_code([] { GeoPoint(0, -180.0001); }), Errc::validation);
  EXPECT_EQ(error_code([] { GeoPoint(NAN, 0); }), Errc::validation);
}

TEST(GeohashDecode, SingleCharacterBox) {
  const auto cell = geohash_decode("s");
  EXPECT_EQ(cell.bbox(), (BoundingBox{0.0, 45.0, 0.0, 45.0}));
}

TEST(GeohashDecode, CenterNearReferencePoint) {
  const auto center = geohash_decode("u4pruydqqvj").center();
  EXPECT_NEAR(center.lat(), 57.64911, 1.5e-6);
  EXPECT_NEAR(center.lon(), 10.40744, 1.5e-6);
}

TEST(GeohashDecode, Errors) {
  EXPECT_EQ(error_code([] { geohash_decode(""); }), Errc::parse);
  try {
    geohash_decode("u4a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse);
    EXPECT_NE(std::string(e.what()).find("position 2"), std::string::npos);
  }
  EXPECT_EQ(error_code([] { geohash_decode("!"); }), Errc::parse);
  EXPECT_EQ(error_code([] { geohash_decode("U"); }), Errc::parse);
  EXPECT_EQ(error_code([] { geohash_decode("0123456789bcd"); }), Errc::parse);
}

TEST(GeohashDecode, CellDimensionsAreExact) {
  const std::string code = "u4pruydqqvjz";
  for (std::size_t n = 1; n <= code.size(); ++n) {
    const auto box = geohash_decode(code.substr(0, n)).bbox();
    EXPECT_EQ(box.lat_max - box.lat_min, 180.0 / std::ldexp(1.0, lat_bits(n))) << n;
    EXPECT_EQ(box.lon_max - box.lon_min, 360.0 / std::ldexp(1.0, lon_bits(n))) << n;
  }
}

TEST(Obfuscate, TruncatesToLevel) {
  const auto cell = geohash_decode("u4pruydqqvj");
  EXPECT_EQ(obfuscate(cell, PrecisionLevel::city).code(), "u4pru");
  EXPECT_EQ(obfuscate(cell, PrecisionLevel::street).code(), "u4pruyd");
  EXPECT_EQ(obfuscate(cell, PrecisionLevel::area).code(), "u4pr");
  EXPECT_EQ(obfuscate(cell, PrecisionLevel::exact).code(), "u4pruydqqvj");
  EXPECT_EQ(obfuscate(cell, PrecisionLevel::city).bbox(), geohash_decode("u4pru").bbox());
}

TEST(Obfuscate, CannotRefine) {
  EXPECT_EQ(error_code([] { obfuscate(geohash_decode("u4pru"), PrecisionLevel::street); }),
            Errc::precision);
}

TEST(PrecisionLevel, LengthsStrictlyDecrease) {
  EXPECT_GT(prefix_length(PrecisionLevel::exact), prefix_length(PrecisionLevel::street));
  EXPECT_GT(prefix_length(PrecisionLevel::street), prefix_length(PrecisionLevel::city));
  EXPECT_GT(prefix_length(PrecisionLevel::city), prefix_length(PrecisionLevel::area));
  EXPECT_EQ(parse_precision_level("street"), PrecisionLevel::street);
  EXPECT_EQ(error_code([] { parse_precision_level("block"); }), Errc::validation);
}

TEST(SharedRegion, PrefixComparison) {
  EXPECT_EQ(common_prefix_length("u4pruydqqvj", "u4pruxxxx"), 5u);
  EXPECT_TRUE(same_region("u4pruydqqvj", "u4pruxxxx", 5));
  EXPECT_FALSE(same_region("u4pruydqqvj", "u4pruxxxx", 6));
  EXPECT_FALSE(same_region("u4", "u4", 3));
}

// Properties over seeded random points.
class GeohashProperty : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240917};
  std::uniform_real_distribution<double> lat{-90.0, 90.0};
  std::uniform_real_distribution<double> lon{-180.0, 180.0};
  std::uniform_int_distribution<int> len{1, 12};
};

TEST_F(GeohashProperty, MatchesOracle) {
  for (int i = 0; i < 10000; ++i) {
    const double a = lat(rng), b = lon(rng);
    const int n = len(rng);
    ASSERT_EQ(geohash_encode(GeoPoint(a, b), n).code(), testing::oracle_geohash(a, b, n))
        << a << "," << b << " n=" << n;
  }
}

TEST_F(GeohashProperty, DecodeMatchesOracleBox) {
  for (int i = 0; i < 2000; ++i) {
    const auto code = testing::oracle_geohash(lat(rng), lon(rng), len(rng));
    const auto box = geohash_decode(code).bbox();
    const auto ref = testing::oracle_bbox(code);
    ASSERT_EQ(box.lat_min, ref.lat_min);
    ASSERT_EQ(box.lat_max, ref.lat_max);
    ASSERT_EQ(box.lon_min, ref.lon_min);
    ASSERT_EQ(box.lon_max, ref.lon_max);
  }
}

TEST_F(GeohashProperty, RoundTripContainsPointAndPrefixesNest) {
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint p(lat(rng), lon(rng));
    const auto full = geohash_encode(p, 12);
    for (std::size_t n = 1; n <= 12; ++n) {
      const auto cell = geohash_encode(p, n);
      ASSERT_TRUE(cell.bbox().contains(p));
      ASSERT_EQ(full.code().substr(0, n), cell.code());
      ASSERT_TRUE(cell.bbox().contains(full.bbox()));
      // Any point of the box maps back to the same code.
      ASSERT_EQ(geohash_encode(cell.center(), n).code(), cell.code());
    }
  }
}

}  // namespace
}  // namespace geomsg::geo
