#include "geomsg/supl/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <memory>
#include <set>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/geo/distance.hpp"
#include "geomsg/sig/link_store.hpp"
#include "geomsg/sig/map_url.hpp"
#include "geomsg/sig/signature.hpp"

namespace geomsg::supl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

struct Section {
  std::string kind;
  std::string name;
  std::size_t line = 0;
  std::multimap<std::string, Entry> entries;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(Errc::parse, fmt::format("line {}: {}", line, what));
}

class SectionReader {
 public:
  explicit SectionReader(const Section& s) : s_(s) {}

  const Entry* get(const std::string& key) const {
    used_.insert(key);
    const auto range = s_.entries.equal_range(key);
    if (range.first == range.second) return nullptr;
    if (std::next(range.first) != range.second) {
      fail(std::next(range.first)->second.line,
           fmt::format("duplicate key '{}'", key));
    }
    return &range.first->second;
  }

  std::vector<Entry> all(const std::string& key) const {
    used_.insert(key);
    std::vector<Entry> out;
    const auto range = s_.entries.equal_range(key);
    for (auto it = range.first; it != range.second; ++it) out.push_back(it->second);
    return out;
  }

  const Entry& require(const std::string& key) const {
    const Entry* e = get(key);
    if (!e) fail(s_.line, fmt::format("[{}] is missing '{}'", s_.kind, key));
    return *e;
  }

  std::string text(const std::string& key, std::string fallback = {}) const {
    const Entry* e = get(key);
    return e ? e->value : fallback;
  }

  double number(const std::string& key, double fallback) const {
    const Entry* e = get(key);
    return e ? parse_number(*e) : fallback;
  }

  static double parse_number(const Entry& e) { return parse_number(e.value, e.line); }

  static double parse_number(std::string_view text, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      fail(line, fmt::format("expected a number, got '{}'", text));
    }
    return v;
  }

  static std::uint64_t parse_unsigned(const Entry& e) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size() || e.value.empty()) {
      fail(e.line, fmt::format("expected a non-negative integer, got '{}'", e.value));
    }
    return v;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const Entry* e = get(key);
    if (!e) return fallback;
    const double v = parse_number(*e);
    if (v != static_cast<double>(static_cast<std::int64_t>(v))) {
      fail(e->line, fmt::format("expected an integer, got '{}'", e->value));
    }
    return static_cast<std::int64_t>(v);
  }

  // Unknown keys are parse errors so typos surface.
  void finish() const {
    for (const auto& [key, entry] : s_.entries) {
      if (!used_.contains(key)) {
        fail(entry.line, fmt::format("unknown key '{}' in [{}]", key, s_.kind));
      }
    }
  }

 private:
  const Section& s_;
  mutable std::set<std::string> used_;
};

// Wraps domain validation errors from constructors with the line number.
template <typename F>
auto at_line(std::size_t line, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::parse && std::string_view(e.what()).starts_with("line ")) {
      throw;
    }
    fail(line, e.what());
  }
}

geo::GeoPoint parse_point(const std::vector<std::string>& w, std::size_t offset,
                          std::size_t line) {
  if (w.size() < offset + 2) fail(line, "expected <lat> <lon>");
  const double lat = SectionReader::parse_number(w[offset], line);
  const double lon = SectionReader::parse_number(w[offset + 1], line);
  return at_line(line, [&] { return geo::GeoPoint(lat, lon); });
}

Geofence parse_fence(const Entry& e) {
  const auto w = words(e.value);
  if (w.size() == 4 && w[0] == "circle") {
    const auto center = parse_point(w, 1, e.line);
    const double radius = SectionReader::parse_number(w[3], e.line);
    return at_line(e.line, [&] { return Geofence::circle(center, radius); });
  }
  if (w.size() == 2 && w[0] == "geohash") {
    return at_line(e.line, [&] { return Geofence::geohash_prefix(w[1]); });
  }
  fail(e.line, fmt::format("bad fence '{}'", e.value));
}

SimTime seconds(double s, std::size_t line, bool allow_zero = true) {
  if (!(s >= 0.0) || (!allow_zero && s == 0.0)) {
    fail(line, fmt::format("time value {} out of range", s));
  }
  return SimTime::from_seconds(s);
}

double probability(const Entry* e, double fallback) {
  if (!e) return fallback;
  const double p = SectionReader::parse_number(*e);
  if (!(p >= 0.0 && p <= 1.0)) fail(e->line, "drop probability outside [0, 1]");
  return p;
}

LinkParams parse_link(const SectionReader& r, LinkParams base) {
  if (const Entry* e = r.get("delay")) {
    base.delay = seconds(SectionReader::parse_number(*e), e->line);
  }
  base.drop_probability = probability(r.get("drop"), base.drop_probability);
  return base;
}

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      const auto w = words(line.substr(1, line.size() - 2));
      if (w.empty()) fail(line_no, "empty section header");
      Section s;
      s.kind = w[0];
      s.line = line_no;
      if (w.size() == 2) s.name = w[1];
      if (w.size() == 3) s.name = w[1] + " " + w[2];
      if (w.size() > 3) fail(line_no, "too many words in section header");
      sections.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (sections.empty()) fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(line_no, "empty key");
    sections.back().entries.emplace(key, Entry{value, line_no});
  }
  return sections;
}

void require_name(const Section& s) {
  if (s.name.empty() || s.name.find(' ') != std::string::npos) {
    fail(s.line, fmt::format("[{}] needs exactly one name", s.kind));
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Scenario sc;
  sc.name = name;
  bool seen_network = false;
  for (const Section& s : split_sections(text)) {
    SectionReader r(s);
    if (s.kind == "network") {
      if (seen_network) fail(s.line, "duplicate [network] section");
      seen_network = true;
      if (const Entry* e = r.get("seed")) sc.seed = SectionReader::parse_unsigned(*e);
      sc.link = parse_link(r, sc.link);
      if (const Entry* e = r.get("timer")) {
        sc.protocol.retransmit_timer =
            seconds(SectionReader::parse_number(*e), e->line, false);
      }
      sc.protocol.max_attempts = static_cast<int>(r.integer("attempts", 3));
      sc.protocol.pos_rounds = static_cast<int>(r.integer("pos_rounds", 2));
      if (sc.protocol.max_attempts < 1) fail(s.line, "attempts must be >= 1");
      if (sc.protocol.pos_rounds < 1) fail(s.line, "pos_rounds must be >= 1");
    } else if (s.kind == "link") {
      const auto ends = words(s.name);
      if (ends.size() != 2) fail(s.line, "[link] needs <from> <to>");
      sc.links.push_back(ScenarioLink{ends[0], ends[1], parse_link(r, sc.link)});
    } else if (s.kind == "device") {
      require_name(s);
      Device d;
      d.id = s.name;
      d.network = r.text("network");
      std::vector<PathSample> samples;
      for (const Entry& e : r.all("path")) {
        const auto w = words(e.value);
        if (w.size() != 3) fail(e.line, "path needs <t> <lat> <lon>");
        const SimTime t = seconds(SectionReader::parse_number(w[0], e.line), e.line);
        samples.push_back(PathSample{t, parse_point(w, 1, e.line)});
      }
      if (samples.empty()) fail(s.line, fmt::format("device {} has no path", d.id));
      d.path = at_line(s.line, [&] { return Path(samples); });
      sc.devices.push_back(std::move(d));
    } else if (s.kind == "slp") {
      require_name(s);
      sc.slps.push_back(s.name);
    } else if (s.kind == "session") {
      ScenarioSession session;
      session.type = r.require("type").value;
      session.set = r.require("set").value;
      session.slp = r.require("slp").value;
      if (const Entry* e = r.get("at")) {
        session.at = seconds(SectionReader::parse_number(*e), e->line);
      }
      if (session.type == "periodic") {
        const Entry& interval = r.require("interval");
        const SimTime iv = seconds(SectionReader::parse_number(interval), interval.line, false);
        const auto count = r.integer("count", 1);
        session.trigger = at_line(s.line, [&] {
          return TriggerSpec::periodic(iv, static_cast<int>(count));
        });
      } else if (session.type == "area") {
        const Geofence fence = parse_fence(r.require("fence"));
        const std::string on = r.text("on", "enter");
        if (on != "enter" && on != "leave") fail(s.line, "on must be enter or leave");
        session.trigger = TriggerSpec::area_event(
            fence, on == "enter" ? AreaEventType::enter : AreaEventType::leave);
      } else if (session.type != "set_initiated" && session.type != "network_initiated") {
        fail(s.line, fmt::format("unknown session type '{}'", session.type));
      }
      sc.sessions.push_back(std::move(session));
    } else if (s.kind == "dslp") {
      require_name(s);
      sc.dslps.push_back(
          DslpServer{s.name, parse_fence(r.require("fence")), r.require("network").value});
    } else if (s.kind == "hslp") {
      require_name(s);
      if (sc.hslp) fail(s.line, "only one [hslp] section is allowed");
      const double window = r.number("grant_window", 3600.0);
      HomeSlp home(s.name, seconds(window, s.line, false));
      for (const Entry& e : r.all("deny")) {
        const auto w = words(e.value);
        if (w.size() != 2) fail(e.line, "deny needs <set> <dslp>");
        home.deny(w[0], w[1]);
      }
      sc.hslp = std::move(home);
    } else if (s.kind == "beacon") {
      require_name(s);
      const Entry& point = r.require("point");
      ScenarioBeacon b{s.name, parse_point(words(point.value), 0, point.line)};
      b.power = r.number("power", -59.0);
      b.jitter = r.number("jitter", 0.0);
      if (const Entry* e = r.get("seed")) b.seed = SectionReader::parse_unsigned(*e);
      if (!geo::RssiSample::valid(b.power)) fail(s.line, "beacon power out of range");
      if (!(b.jitter >= 0.0)) fail(s.line, "beacon jitter must be >= 0");
      sc.beacons.push_back(std::move(b));
    } else if (s.kind == "authorize") {
      ScenarioAuthorize a;
      a.set = r.require("set").value;
      if (const Entry* e = r.get("at")) a.at = seconds(SectionReader::parse_number(*e), e->line);
      sc.authorizations.push_back(std::move(a));
    } else if (s.kind == "scan") {
      ScenarioScan scan;
      scan.set = r.require("set").value;
      for (const Entry& e : r.all("at")) {
        scan.at.push_back(seconds(SectionReader::parse_number(e), e.line));
      }
      if (scan.at.empty()) fail(s.line, "[scan] needs at least one 'at'");
      scan.threshold_m = r.number("threshold", 5.0);
      scan.hysteresis_m = r.number("hysteresis", 0.0);
      if (!(scan.threshold_m > 0.0)) fail(s.line, "threshold must be > 0");
      if (!(scan.hysteresis_m >= 0.0)) fail(s.line, "hysteresis must be >= 0");
      sc.scans.push_back(std::move(scan));
    } else {
      fail(s.line, fmt::format("unknown section [{}]", s.kind));
    }
    r.finish();
  }

  auto has_device = [&](const std::string& id) {
    return std::any_of(sc.devices.begin(), sc.devices.end(),
                       [&](const Device& d) { return d.id == id; });
  };
  auto has_slp = [&](const std::string& id) {
    return std::find(sc.slps.begin(), sc.slps.end(), id) != sc.slps.end();
  };
  for (const auto& session : sc.sessions) {
    if (!has_device(session.set)) {
      throw Error(Errc::parse, fmt::format("session references unknown device '{}'",
                                           session.set));
    }
    if (!has_slp(session.slp)) {
      throw Error(Errc::parse,
                  fmt::format("session references unknown slp '{}'", session.slp));
    }
  }
  for (const auto& a : sc.authorizations) {
    if (!has_device(a.set)) {
      throw Error(Errc::parse, fmt::format("[authorize] references unknown device '{}'", a.set));
    }
    if (!sc.hslp) throw Error(Errc::parse, "[authorize] needs an [hslp] section");
  }
  for (const auto& scan : sc.scans) {
    if (!has_device(scan.set)) {
      throw Error(Errc::parse, fmt::format("[scan] references unknown device '{}'", scan.set));
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::parse, fmt::format("cannot read scenario '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.stem().string());
}

std::size_t ScenarioResult::ended() const {
  return static_cast<std::size_t>(
      std::count_if(sessions.begin(), sessions.end(),
                    [](const SuplSession& s) { return s.state() == SessionState::ENDED; }));
}

std::size_t ScenarioResult::failed() const {
  return static_cast<std::size_t>(
      std::count_if(sessions.begin(), sessions.end(),
                    [](const SuplSession& s) { return s.state() == SessionState::FAILED; }));
}

std::string ScenarioResult::trace_text() const {
  std::string out;
  for (const auto& record : trace) {
    out += format_trace_record(record);
    out += '\n';
  }
  return out;
}

std::string ScenarioResult::summary() const {
  std::string out = fmt::format("sessions: {} ended, {} failed\n", ended(), failed());
  out += fmt::format("reports: {}\n", reports);
  out += fmt::format("notifications: {}\n", notifications.size());
  for (const auto& e : errors) out += "error: " + e + "\n";
  return out;
}

ScenarioResult run_scenario(const Scenario& scenario) {
  SuplSimulation sim(scenario.link, scenario.seed, scenario.protocol);
  for (const auto& d : scenario.devices) sim.add_device(d);
  for (const auto& slp : scenario.slps) sim.add_slp(slp);
  for (const auto& link : scenario.links) {
    sim.net().set_link(link.from, link.to, link.params);
  }

  std::vector<std::string> sids;
  for (const auto& s : scenario.sessions) {
    if (s.type == "network_initiated") {
      sids.push_back(sim.start_network_initiated(s.set, s.slp, s.at));
    } else if (s.trigger) {
      sids.push_back(sim.start_triggered(s.set, s.slp, *s.trigger, s.at));
    } else {
      sids.push_back(sim.start_set_initiated(s.set, s.slp, s.at));
    }
  }

  ScenarioResult result;

  // Notification links live in a scenario-local shortener with a frozen
  // clock so the messages are reproducible.
  sig::LinkStore links([] { return sig::Timestamp{0}; });
  sig::Signer signer(sig::MapUrlBuilder(), links);
  std::vector<Beacon> beacons;
  for (const auto& b : scenario.beacons) {
    beacons.emplace_back(b.id, b.point, b.power, b.jitter, b.seed);
  }
  CollectingSink sink;
  std::vector<std::unique_ptr<ProximityScanner>> scanners;

  for (const auto& a : scenario.authorizations) {
    sim.net().schedule_at(a.at, [&sim, &scenario, &result, a] {
      try {
        Device& d = sim.device(a.set);
        result.grants.push_back(
            authorize_dslp(d, scenario.dslps, *scenario.hslp, sim.net().now()));
      } catch (const Error& e) {
        result.errors.push_back(fmt::format("t={} authorize {}: {}",
                                            sim.net().now().str(), a.set, e.what()));
      }
    });
  }
  for (const auto& scan : scenario.scans) {
    ProximityScanner::Options options;
    options.hysteresis_m = scan.hysteresis_m;
    scanners.push_back(std::make_unique<ProximityScanner>(signer, options));
    ProximityScanner* scanner = scanners.back().get();
    for (const SimTime at : scan.at) {
      sim.net().schedule_at(at, [&sim, &result, &beacons, &sink, scanner, scan] {
        try {
          auto sent = scanner->scan(sim.device(scan.set), sim.net().now(), beacons,
                                    scan.threshold_m, sink);
          result.notifications.insert(result.notifications.end(), sent.begin(),
                                      sent.end());
        } catch (const Error& e) {
          result.errors.push_back(fmt::format("t={} scan {}: {}",
                                              sim.net().now().str(), scan.set, e.what()));
        }
      });
    }
  }

  sim.run();

  for (const auto& sid : sids) {
    result.sessions.push_back(sim.session(sid));
    result.reports += sim.reports(sid).size();
  }
  result.trace = sim.net().trace();
  return result;
}

}  // namespace geomsg::supl
