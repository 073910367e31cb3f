#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "geomsg/geo/point.hpp"

namespace geomsg::geo {

inline constexpr std::string_view kGeohashAlphabet =
    "0123456789bcdefghjkmnpqrstuvwxyz";
inline constexpr std::size_t kMaxGeohashLength = 12;

struct BoundingBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat() >= lat_min && p.lat() <= lat_max && p.lon() >= lon_min &&
           p.lon() <= lon_max;
  }
  bool contains(const BoundingBox& inner) const {
    return inner.lat_min >= lat_min && inner.lat_max <= lat_max &&
           inner.lon_min >= lon_min && inner.lon_max <= lon_max;
  }
  bool operator==(const BoundingBox&) const = default;
};

// A geohash code together with the region it denotes.
class GeohashCell {
 public:
  const std::string& code() const { return code_; }
  const BoundingBox& bbox() const { return bbox_; }
  std::size_t length() const { return code_.size(); }
  GeoPoint center() const;

  bool operator==(const GeohashCell&) const = default;

 private:
  friend GeohashCell geohash_decode(std::string_view code);
  GeohashCell(std::string code, BoundingBox bbox)
      : code_(std::move(code)), bbox_(bbox) {}

  std::string code_;
  BoundingBox bbox_;
};

// Longitude takes the even bit positions, latitude the odd ones. A value on
// an interval midpoint goes to the upper half.
GeohashCell geohash_encode(const GeoPoint& p, std::size_t length);

// Throws Errc::parse naming the first offending position.
GeohashCell geohash_decode(std::string_view code);

// Bits spent on each axis for a code of `length` characters.
constexpr std::size_t lat_bits(std::size_t length) { return 5 * length / 2; }
constexpr std::size_t lon_bits(std::size_t length) {
  return (5 * length + 1) / 2;
}

std::size_t common_prefix_length(std::string_view a, std::string_view b);

// True when both codes agree on their first `chars` characters. Codes
// shorter than `chars` never share the region.
bool same_region(std::string_view a, std::string_view b, std::size_t chars);

enum class PrecisionLevel { exact, street, city, area };

std::size_t prefix_length(PrecisionLevel level);
const char* to_string(PrecisionLevel level);
PrecisionLevel parse_precision_level(std::string_view name);

// Coarsens `cell` to the level's prefix. Refining is impossible and throws
// Errc::precision.
GeohashCell obfuscate(const GeohashCell& cell, PrecisionLevel level);

}  // namespace geomsg::geo
