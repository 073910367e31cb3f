#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geomsg/cell/fix_cache.hpp"
#include "geomsg/dyn/positioning.hpp"
#include "geomsg/sig/map_url.hpp"
#include "geomsg/sim_time.hpp"

namespace geomsg::dyn {

// A dynamic geo-message: it names its owner instead of carrying a location,
// and only the listed recipients may open it.
struct Flow {
  std::string flow_id;
  std::string owner;
  std::vector<std::string> recipients;
  SimTime created_at;
  bool active = true;
};

struct OpenResult {
  cell::Fix sender_fix;
  cell::Fix viewer_fix;
  double distance_km = 0.0;
  double eta_s = 0.0;
  std::string map_url;
};

// Registry of one-to-many location sharing flows.
//
// With a log path the registry appends one record per change and replays
// the log on construction:
//
//   F <flow_id> <created_at> <owner> <recipient>[,<recipient>...]
//   X <flow_id> <closed_at>
class FlowRegistry {
 public:
  struct Options {
    double walking_speed_mps = 1.4;
    std::optional<SimTime> ttl;
  };

  FlowRegistry(sig::MapUrlBuilder maps, Options options,
               std::optional<std::filesystem::path> log_path = std::nullopt);
  explicit FlowRegistry(sig::MapUrlBuilder maps = sig::MapUrlBuilder());

  void register_device(const std::string& device);

  Flow create_flow(const std::string& owner, const std::vector<std::string>& recipients,
                   SimTime now);

  // Resolves both parties' current fixes. The registry lock is not held
  // while positioning runs.
  OpenResult open_message(const std::string& flow_id, const std::string& viewer,
                          SimTime now, Positioning& positioning);

  // Closing a closed flow is a no-op.
  Flow close_flow(const std::string& flow_id, SimTime now);

  std::optional<Flow> find(const std::string& flow_id) const;
  std::vector<Flow> active_flows(const std::optional<std::string>& owner = std::nullopt,
                                 std::optional<SimTime> now = std::nullopt) const;

 private:
  void replay();
  void append(const std::string& line);
  bool expired(const Flow& flow, SimTime now) const;

  sig::MapUrlBuilder maps_;
  Options options_;
  std::optional<std::filesystem::path> log_path_;
  mutable std::mutex mutex_;
  std::set<std::string> devices_;
  std::map<std::string, Flow> flows_;
  std::uint64_t counter_ = 0;
};

}  // namespace geomsg::dyn
