#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "geomsg/geo/point.hpp"
#include "geomsg/sim_time.hpp"

namespace geomsg::cell {

enum class FixSource { cell, supl, cached };
const char* to_string(FixSource source);

struct Fix {
  geo::GeoPoint point;
  SimTime timestamp;
  FixSource source = FixSource::supl;

  bool operator==(const Fix&) const = default;
};

// Displacement reported by the motion sensor since the last accepted fix.
class MovementSignal {
 public:
  explicit MovementSignal(double displacement_m);
  double displacement_m() const { return displacement_m_; }

 private:
  double displacement_m_;
};

using FixProducer = std::function<Fix()>;

// Per-device cache of the last fix, refreshed only when the device has moved
// at least `threshold_m` (and, optionally, when the fix is older than
// max_age). Calls for the same device are serialized, so a stationary device
// triggers its producer once no matter how many threads ask.
class FixCache {
 public:
  struct Options {
    double threshold_m = 25.0;
    std::optional<SimTime> max_age;
  };

  FixCache() = default;
  explicit FixCache(Options options) : options_(options) {}

  void register_device(const std::string& device);
  bool registered(const std::string& device) const;

  // `now` is only consulted when max_age is set.
  Fix get_fix(const std::string& device, const MovementSignal& movement,
              const FixProducer& fresh, SimTime now = SimTime());

  std::optional<Fix> cached(const std::string& device) const;
  const Options& options() const { return options_; }

 private:
  struct Entry {
    std::mutex mutex;
    std::optional<Fix> fix;
  };

  std::shared_ptr<Entry> entry(const std::string& device) const;

  Options options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
};

}  // namespace geomsg::cell
