#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>

#include "geomsg/cell/fix_cache.hpp"
#include "geomsg/sim_time.hpp"
#include "geomsg/supl/device.hpp"
#include "geomsg/supl/simulation.hpp"

namespace geomsg::dyn {

// Where a device is right now. May block; must be callable from any thread.
class Positioning {
 public:
  virtual ~Positioning() = default;
  virtual cell::Fix locate(const std::string& device, SimTime now) = 0;
};

// Positions simulated devices through the movement-gated fix cache. A cache
// miss runs a set-initiated SUPL session for the device on a private
// simulator; the displacement fed to the cache is the distance between the
// device's true position and its cached fix.
class SimulatedPositioning final : public Positioning {
 public:
  struct Options {
    supl::LinkParams link{};
    std::uint64_t seed = 1;
    supl::ProtocolParams protocol{};
    std::string slp = "slp";
  };

  explicit SimulatedPositioning(cell::FixCache& cache);
  SimulatedPositioning(cell::FixCache& cache, Options options);

  void add_device(supl::Device device);

  cell::Fix locate(const std::string& device, SimTime now) override;

  // Number of SUPL sessions run so far.
  std::size_t sessions_run() const { return sessions_run_.load(); }

 private:
  supl::Device device_copy(const std::string& id) const;

  cell::FixCache& cache_;
  Options options_;
  mutable std::mutex mutex_;
  std::map<std::string, supl::Device> devices_;
  std::atomic<std::size_t> sessions_run_{0};
};

}  // namespace geomsg::dyn
