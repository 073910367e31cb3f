#include "geomsg/supl/geofence.hpp"

#include <cmath>

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/geo/distance.hpp"
#include "geomsg/geo/geohash.hpp"

namespace geomsg::supl {

Geofence Geofence::circle(geo::GeoPoint center, double radius_m) {
  if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
    throw Error(Errc::validation,
                fmt::format("fence radius must be > 0, got {}", radius_m));
  }
  return Geofence(CircleFence{center, radius_m});
}

Geofence Geofence::geohash_prefix(std::string code) {
  geo::geohash_decode(code);  // validates
  return Geofence(GeohashFence{std::move(code)});
}

bool Geofence::contains(const geo::GeoPoint& p) const {
  if (const auto* c = std::get_if<CircleFence>(&shape_)) {
    return geo::haversine_m(c->center, p) <= c->radius_m;
  }
  const auto& g = std::get<GeohashFence>(shape_);
  return geo::geohash_encode(p, g.code.size()).code() == g.code;
}

std::string Geofence::describe() const {
  if (const auto* c = std::get_if<CircleFence>(&shape_)) {
    return fmt::format("circle {} {}", geo::format_coords(c->center), c->radius_m);
  }
  return "geohash " + std::get<GeohashFence>(shape_).code;
}

const char* to_string(AreaEventType on) {
  return on == AreaEventType::enter ? "enter" : "leave";
}

TriggerSpec TriggerSpec::periodic(SimTime interval, int count) {
  if (interval <= SimTime()) {
    throw Error(Errc::validation, "periodic trigger interval must be > 0");
  }
  if (count < 1) {
    throw Error(Errc::validation, "periodic trigger count must be >= 1");
  }
  return TriggerSpec(PeriodicTrigger{interval, count});
}

TriggerSpec TriggerSpec::area_event(Geofence fence, AreaEventType on) {
  return TriggerSpec(AreaEventTrigger{std::move(fence), on});
}

}  // namespace geomsg::supl
