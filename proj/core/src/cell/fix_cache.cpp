#include "geomsg/cell/fix_cache.hpp"

#include <cmath>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::cell {

const char* to_string(FixSource source) {
  switch (source) {
    case FixSource::cell: return "cell";
    case FixSource::supl: return "supl";
    case FixSource::cached: return "cached";
  }
  return "supl";
}

MovementSignal::MovementSignal(double displacement_m)
    : displacement_m_(displacement_m) {
  if (!(displacement_m >= 0.0) || !std::isfinite(displacement_m)) {
    throw Error(Errc::validation,
                fmt::format("displacement must be >= 0, got {}", displacement_m));
  }
}

void FixCache::register_device(const std::string& device) {
  std::lock_guard lock(mutex_);
  entries_.try_emplace(device, std::make_shared<Entry>());
}

bool FixCache::registered(const std::string& device) const {
  std::lock_guard lock(mutex_);
  return entries_.contains(device);
}

std::shared_ptr<FixCache::Entry> FixCache::entry(const std::string& device) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(device);
  if (it == entries_.end()) {
    throw Error(Errc::not_found,
                fmt::format("device '{}' is not registered", device));
  }
  return it->second;
}

Fix FixCache::get_fix(const std::string& device, const MovementSignal& movement,
                      const FixProducer& fresh, SimTime now) {
  const auto e = entry(device);
  std::lock_guard lock(e->mutex);
  if (e->fix && movement.displacement_m() < options_.threshold_m) {
    const bool stale = options_.max_age && now - e->fix->timestamp > *options_.max_age;
    if (!stale) {
      Fix out = *e->fix;
      out.source = FixSource::cached;
      return out;
    }
  }
  Fix produced = fresh();
  if (e->fix && produced.timestamp < e->fix->timestamp) {
    throw Error(Errc::positioning,
                fmt::format("fix for '{}' goes back in time", device));
  }
  e->fix = produced;
  return produced;
}

std::optional<Fix> FixCache::cached(const std::string& device) const {
  const auto e = entry(device);
  std::lock_guard lock(e->mutex);
  return e->fix;
}

}  // namespace geomsg::cell
