#include "geomsg/geo/point.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::geo {

bool GeoPoint::valid(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 &&
         lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!valid(lat, lon)) {
    throw Error(Errc::validation,
                fmt::format("coordinates out of range: lat {} lon {}", lat, lon));
  }
}

std::string format_coords(const GeoPoint& p) {
  return fmt::format("{:.6f} {:.6f}", p.lat(), p.lon());
}

std::string format_coords_csv(const GeoPoint& p) {
  return fmt::format("{:.6f},{:.6f}", p.lat(), p.lon());
}

namespace {

double parse_number(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(Errc::parse, fmt::format("bad coordinate '{}'", whole));
  }
  return value;
}

}  // namespace

GeoPoint parse_coords_csv(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(Errc::parse, fmt::format("expected <lat>,<lon>: '{}'", text));
  }
  std::string_view sv(text);
  const double lat = parse_number(sv.substr(0, comma), text);
  const double lon = parse_number(sv.substr(comma + 1), text);
  return GeoPoint(lat, lon);
}

}  // namespace geomsg::geo
