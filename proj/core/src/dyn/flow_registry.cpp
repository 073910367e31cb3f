#include "geomsg/dyn/flow_registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/geo/distance.hpp"

namespace geomsg::dyn {

FlowRegistry::FlowRegistry(sig::MapUrlBuilder maps, Options options,
                           std::optional<std::filesystem::path> log_path)
    : maps_(std::move(maps)), options_(options), log_path_(std::move(log_path)) {
  if (!(options_.walking_speed_mps > 0.0)) {
    throw Error(Errc::config, "walking speed must be > 0");
  }
  if (log_path_) replay();
}

FlowRegistry::FlowRegistry(sig::MapUrlBuilder maps)
    : FlowRegistry(std::move(maps), Options{}) {}

void FlowRegistry::register_device(const std::string& device) {
  std::lock_guard lock(mutex_);
  devices_.insert(device);
}

void FlowRegistry::replay() {
  std::ifstream in(*log_path_);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    std::string id;
    std::int64_t at = 0;
    fields >> tag >> id >> at;
    auto bad = [&] {
      return Error(Errc::storage, fmt::format("{}:{}: malformed flow record",
                                              log_path_->string(), line_no));
    };
    if (!fields) throw bad();
    if (tag == "F") {
      Flow flow{id, {}, {}, SimTime::from_micros(at), true};
      std::string recipients;
      fields >> flow.owner >> recipients;
      if (flow.owner.empty() || recipients.empty()) throw bad();
      std::istringstream list(recipients);
      for (std::string r; std::getline(list, r, ',');) {
        if (!r.empty()) flow.recipients.push_back(r);
      }
      if (const auto dash = id.rfind('-'); dash != std::string::npos) {
        counter_ = std::max<std::uint64_t>(counter_, std::stoull(id.substr(dash + 1)));
      }
      flows_[id] = std::move(flow);
    } else if (tag == "X") {
      const auto it = flows_.find(id);
      if (it == flows_.end()) throw bad();
      it->second.active = false;
    } else {
      throw bad();
    }
  }
}

void FlowRegistry::append(const std::string& line) {
  if (!log_path_) return;
  std::ofstream out(*log_path_, std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) {
    throw Error(Errc::storage,
                fmt::format("cannot append to flow log '{}'", log_path_->string()));
  }
}

bool FlowRegistry::expired(const Flow& flow, SimTime now) const {
  return options_.ttl && now - flow.created_at > *options_.ttl;
}

Flow FlowRegistry::create_flow(const std::string& owner,
                               const std::vector<std::string>& recipients,
                               SimTime now) {
  if (recipients.empty()) {
    throw Error(Errc::validation, "a flow needs at least one recipient");
  }
  std::lock_guard lock(mutex_);
  if (!devices_.contains(owner)) {
    throw Error(Errc::validation, fmt::format("owner '{}' is not registered", owner));
  }
  std::string joined;
  for (const auto& r : recipients) {
    if (!devices_.contains(r)) {
      throw Error(Errc::validation, fmt::format("recipient '{}' is not registered", r));
    }
    if (!joined.empty()) joined += ',';
    joined += r;
  }
  Flow flow{fmt::format("flow-{}", counter_ + 1), owner, recipients, now, true};
  append(fmt::format("F {} {} {} {}", flow.flow_id, now.micros(), owner, joined));
  ++counter_;
  flows_[flow.flow_id] = flow;
  return flow;
}

OpenResult FlowRegistry::open_message(const std::string& flow_id,
                                      const std::string& viewer, SimTime now,
                                      Positioning& positioning) {
  Flow flow;
  {
    std::lock_guard lock(mutex_);
    const auto it = flows_.find(flow_id);
    if (it == flows_.end()) {
      throw Error(Errc::not_found, fmt::format("unknown flow '{}'", flow_id));
    }
    flow = it->second;
  }
  if (!flow.active || expired(flow, now)) {
    throw Error(Errc::flow_closed, fmt::format("flow '{}' is closed", flow_id));
  }
  if (std::find(flow.recipients.begin(), flow.recipients.end(), viewer) ==
      flow.recipients.end()) {
    throw Error(Errc::authorization,
                fmt::format("'{}' is not a recipient of {}", viewer, flow_id));
  }

  auto locate = [&](const char* role, const std::string& device) {
    try {
      return positioning.locate(device, now);
    } catch (const Error& e) {
      throw Error(Errc::positioning,
                  fmt::format("cannot position {} '{}': {}", role, device, e.what()));
    }
  };
  OpenResult out{locate("sender", flow.owner), locate("viewer", viewer), 0.0, 0.0, {}};
  out.distance_km = geo::haversine_km(out.sender_fix.point, out.viewer_fix.point);
  out.eta_s = out.distance_km * 1000.0 / options_.walking_speed_mps;
  out.map_url = maps_.build(out.sender_fix.point, out.viewer_fix.point);
  return out;
}

Flow FlowRegistry::close_flow(const std::string& flow_id, SimTime now) {
  std::lock_guard lock(mutex_);
  const auto it = flows_.find(flow_id);
  if (it == flows_.end()) {
    throw Error(Errc::not_found, fmt::format("unknown flow '{}'", flow_id));
  }
  if (it->second.active) {
    append(fmt::format("X {} {}", flow_id, now.micros()));
    it->second.active = false;
  }
  return it->second;
}

std::optional<Flow> FlowRegistry::find(const std::string& flow_id) const {
  std::lock_guard lock(mutex_);
  const auto it = flows_.find(flow_id);
  if (it == flows_.end()) return std::nullopt;
  return it->second;
}

std::vector<Flow> FlowRegistry::active_flows(const std::optional<std::string>& owner,
                                             std::optional<SimTime> now) const {
  std::lock_guard lock(mutex_);
  std::vector<Flow> out;
  for (const auto& [id, flow] : flows_) {
    if (!flow.active) continue;
    if (owner && flow.owner != *owner) continue;
    if (now && expired(flow, *now)) continue;
    out.push_back(flow);
  }
  return out;
}

}  // namespace geomsg::dyn
