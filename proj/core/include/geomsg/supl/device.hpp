#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geomsg/geo/point.hpp"
#include "geomsg/sim_time.hpp"
#include "geomsg/supl/dslp.hpp"

namespace geomsg::supl {

struct PathSample {
  SimTime time;
  geo::GeoPoint point;
};

// Piecewise-linear trajectory. Before the first sample and after the last
// one the device holds still.
class Path {
 public:
  Path() = default;
  // Throws Errc::validation when empty or not strictly increasing in time.
  explicit Path(std::vector<PathSample> samples);
  static Path stationary(geo::GeoPoint p);

  geo::GeoPoint position_at(SimTime t) const;
  const std::vector<PathSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }

 private:
  std::vector<PathSample> samples_;
};

// A SUPL enabled terminal: where it is, which access network it is
// attached to, and the D-SLP grant it holds.
struct Device {
  std::string id;
  Path path;
  std::string network;
  std::string capabilities = "agps,ecid";
  std::optional<DslpGrant> grant;
};

}  // namespace geomsg::supl
