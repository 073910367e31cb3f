#include "geomsg/dyn/positioning.hpp"

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/geo/distance.hpp"

namespace geomsg::dyn {

SimulatedPositioning::SimulatedPositioning(cell::FixCache& cache)
    : SimulatedPositioning(cache, Options{}) {}

SimulatedPositioning::SimulatedPositioning(cell::FixCache& cache, Options options)
    : cache_(cache), options_(std::move(options)) {}

void SimulatedPositioning::add_device(supl::Device device) {
  cache_.register_device(device.id);
  std::lock_guard lock(mutex_);
  devices_.insert_or_assign(device.id, std::move(device));
}

supl::Device SimulatedPositioning::device_copy(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = devices_.find(id);
  if (it == devices_.end()) {
    throw Error(Errc::not_found, fmt::format("unknown device '{}'", id));
  }
  return it->second;
}

cell::Fix SimulatedPositioning::locate(const std::string& id, SimTime now) {
  const supl::Device device = device_copy(id);
  const geo::GeoPoint truth = device.path.position_at(now);
  const auto previous = cache_.cached(id);
  const double moved = previous ? geo::haversine_m(previous->point, truth) : 0.0;

  return cache_.get_fix(id, cell::MovementSignal(moved), [&] {
    supl::SuplSimulation sim(options_.link, options_.seed, options_.protocol);
    sim.add_device(device);
    sim.add_slp(options_.slp);
    const auto sid = sim.start_set_initiated(id, options_.slp, now);
    sim.run();
    ++sessions_run_;
    const auto& session = sim.session(sid);
    if (session.state() != supl::SessionState::ENDED || !session.result()) {
      throw Error(Errc::positioning,
                  fmt::format("SUPL session for '{}' failed: {}", id, session.failure()));
    }
    return *session.result();
  }, now);
}

}  // namespace geomsg::dyn
