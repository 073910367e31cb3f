#pragma once

#include <string>
#include <variant>

#include "geomsg/geo/point.hpp"
#include "geomsg/sim_time.hpp"

namespace geomsg::supl {

struct CircleFence {
  geo::GeoPoint center;
  double radius_m = 0.0;
};

struct GeohashFence {
  std::string code;
};

// Service area or trigger region: a circle, or every point whose geohash
// starts with a given code.
class Geofence {
 public:
  static Geofence circle(geo::GeoPoint center, double radius_m);
  static Geofence geohash_prefix(std::string code);

  bool contains(const geo::GeoPoint& p) const;
  const std::variant<CircleFence, GeohashFence>& shape() const { return shape_; }
  std::string describe() const;

 private:
  explicit Geofence(std::variant<CircleFence, GeohashFence> shape)
      : shape_(std::move(shape)) {}

  std::variant<CircleFence, GeohashFence> shape_;
};

enum class AreaEventType { enter, leave };
const char* to_string(AreaEventType on);

struct PeriodicTrigger {
  SimTime interval;
  int count = 1;
};

struct AreaEventTrigger {
  Geofence fence;
  AreaEventType on = AreaEventType::enter;
};

// Exactly one variant is set by construction.
class TriggerSpec {
 public:
  static TriggerSpec periodic(SimTime interval, int count);
  static TriggerSpec area_event(Geofence fence, AreaEventType on);

  const PeriodicTrigger* as_periodic() const {
    return std::get_if<PeriodicTrigger>(&spec_);
  }
  const AreaEventTrigger* as_area_event() const {
    return std::get_if<AreaEventTrigger>(&spec_);
  }

 private:
  explicit TriggerSpec(std::variant<PeriodicTrigger, AreaEventTrigger> spec)
      : spec_(std::move(spec)) {}

  std::variant<PeriodicTrigger, AreaEventTrigger> spec_;
};

}  // namespace geomsg::supl
