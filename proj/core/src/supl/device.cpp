#include "geomsg/supl/device.hpp"

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::supl {

Path::Path(std::vector<PathSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error(Errc::validation, "empty path");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (samples_[i].time <= samples_[i - 1].time) {
      throw Error(Errc::validation,
                  fmt::format("path time {} not after {}", samples_[i].time.str(),
                              samples_[i - 1].time.str()));
    }
  }
}

Path Path::stationary(geo::GeoPoint p) {
  return Path({PathSample{SimTime(), p}});
}

geo::GeoPoint Path::position_at(SimTime t) const {
  if (samples_.empty()) throw Error(Errc::positioning, "device has no position source");
  if (t <= samples_.front().time) return samples_.front().point;
  if (t >= samples_.back().time) return samples_.back().point;
  std::size_t hi = 1;
  while (samples_[hi].time < t) ++hi;
  const auto& a = samples_[hi - 1];
  const auto& b = samples_[hi];
  const double f = static_cast<double>((t - a.time).micros()) /
                   static_cast<double>((b.time - a.time).micros());
  return geo::GeoPoint(a.point.lat() + f * (b.point.lat() - a.point.lat()),
                       a.point.lon() + f * (b.point.lon() - a.point.lon()));
}

}  // namespace geomsg::supl
