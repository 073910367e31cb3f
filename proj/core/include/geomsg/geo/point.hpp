#pragma once

#include <string>

namespace geomsg::geo {

/**
 * WGS-84 coordinate pair in decimal degrees.
 *
 * Construction validates the ranges lat in [-90, 90] and lon in [-180, 180];
 * a GeoPoint value is therefore always valid.
 */
class GeoPoint {
 public:
  GeoPoint() = default;
  GeoPoint(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  bool operator==(const GeoPoint&) const = default;

  static bool valid(double lat, double lon);

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

// "<lat> <lon>" with six fractional digits.
std::string format_coords(const GeoPoint& p);

// "<lat>,<lon>" with six fractional digits.
std::string format_coords_csv(const GeoPoint& p);

// Parses "<lat>,<lon>".
GeoPoint parse_coords_csv(const std::string& text);

}  // namespace geomsg::geo
