#pragma once

#include <cstdint>
#include <filesystem>
#include <list>
#include <optional>
#include <string>
#include <vector>

#include "geomsg/supl/device.hpp"
#include "geomsg/supl/dslp.hpp"
#include "geomsg/supl/proximity.hpp"
#include "geomsg/supl/session.hpp"
#include "geomsg/supl/simulation.hpp"

namespace geomsg::supl {

// Scenario file: '#' comments, `[section name]` headers and `key = value`
// lines. Repeating a key appends to a list.
//
//   [network]           seed, delay, drop, timer, attempts, pos_rounds
//   [link <from> <to>]  delay, drop
//   [device <id>]       network, path = <t> <lat> <lon> (repeated)
//   [slp <name>]
//   [session]           type = set_initiated | network_initiated | periodic | area,
//                       set, slp, at, interval, count, fence, on
//   [dslp <id>]         fence, network
//   [hslp <id>]         grant_window, deny = <set> <dslp> (repeated)
//   [beacon <id>]       point = <lat> <lon>, power, jitter, seed
//   [authorize]         set, at
//   [scan]              set, at (repeated), threshold, hysteresis
//
// fence = circle <lat> <lon> <radius_m> | geohash <code>
struct ScenarioSession {
  std::string type;
  std::string set;
  std::string slp;
  SimTime at;
  std::optional<TriggerSpec> trigger;
};

struct ScenarioAuthorize {
  std::string set;
  SimTime at;
};

struct ScenarioScan {
  std::string set;
  std::vector<SimTime> at;
  double threshold_m = 5.0;
  double hysteresis_m = 0.0;
};

struct ScenarioBeacon {
  std::string id;
  geo::GeoPoint point;
  double power = -59.0;
  double jitter = 0.0;
  std::uint64_t seed = 1;
};

struct ScenarioLink {
  std::string from;
  std::string to;
  LinkParams params;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  LinkParams link;
  ProtocolParams protocol;
  std::vector<ScenarioLink> links;
  std::vector<Device> devices;
  std::vector<std::string> slps;
  std::vector<ScenarioSession> sessions;
  std::vector<DslpServer> dslps;
  std::optional<HomeSlp> hslp;
  std::vector<ScenarioBeacon> beacons;
  std::vector<ScenarioAuthorize> authorizations;
  std::vector<ScenarioScan> scans;
};

// Throws Errc::parse with the offending line number.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

struct ScenarioResult {
  std::vector<SuplSession> sessions;
  std::vector<TraceRecord> trace;
  std::size_t reports = 0;
  std::vector<Notification> notifications;
  std::vector<DslpGrant> grants;
  // Authorization or scan steps that raised a domain error, in order.
  std::vector<std::string> errors;

  std::size_t ended() const;
  std::size_t failed() const;
  std::string trace_text() const;
  std::string summary() const;
};

ScenarioResult run_scenario(const Scenario& scenario);

}  // namespace geomsg::supl
