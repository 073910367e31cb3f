// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "geomsg/cell/fix_cache.hpp"
#include "geomsg/geo/distance.hpp"
#include "geomsg/geo/geohash.hpp"
#include "geomsg/sig/compose.hpp"
#include "geomsg/sig/link_store.hpp"
#include "geomsg/supl/dslp.hpp"
#include "geomsg/supl/proximity.hpp"
#include "geomsg/supl/scenario.hpp"
#include "geomsg/supl/simulation.hpp"
#include "support/geohash_oracle.hpp"

namespace {

using namespace geomsg;
using geo::GeoPoint;
namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

SimTime sec(double s) { return SimTime::from_seconds(s); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("geomsg_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 1 -------------------------------------------------------------------------

Outcome geohash_oracle_equivalence() {
  std::mt19937_64 rng(20161);
  std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0);
  std::uniform_int_distribution<int> len(1, 12);
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int i = 0; i < 10'000; ++i) {
    const double la = lat(rng), lo = lon(rng);
    const int n = len(rng);
    if (geo::geohash_encode(GeoPoint(la, lo), n).code() != geomsg::testing::oracle_geohash(la, lo, n)) {
      ++mismatches;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {mismatches == 0 && seconds < 5.0,
          fmt::format("{} mismatches in 10000 pairs, {:.3f} s (limit 5 s)", mismatches, seconds)};
}

// 2 -------------------------------------------------------------------------

Outcome geohash_containment_and_nesting() {
  std::mt19937_64 rng(20162);
  std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0);
  std::uniform_int_distribution<int> len(1, 12);
  int containment = 0, nesting = 0;
  for (int i = 0; i < 10'000; ++i) {
    const GeoPoint p(lat(rng), lon(rng));
    const int n = len(rng);
    const auto full = geo::geohash_encode(p, n);
    if (!geo::geohash_decode(full.code()).bbox().contains(p)) ++containment;
    for (int m = 1; m < n; ++m) {
      const auto prefix = geo::geohash_encode(p, m);
      if (full.code().rfind(prefix.code(), 0) != 0 || !prefix.bbox().contains(full.bbox())) {
        ++nesting;
      }
    }
  }
  return {containment == 0 && nesting == 0,
          fmt::format("{} containment and {} nesting violations on 10000 points", containment,
                      nesting)};
}

// 3 -------------------------------------------------------------------------

Outcome rssi_formulas() {
  bool ok = geo::rssi_distance_m(geo::RssiSample(-59, -59)) == 1.0;
  // Hand evaluation: 20 dB -> x100 -> 10 m; 6 dB -> 10^0.6 = 3.98107 -> 1.99526 m.
  const double worked[][3] = {{-59, -59, 1.0}, {-59, -79, 10.0}, {-59, -65, 1.995262}};
  double worst = 0.0;
  for (const auto& w : worked) {
    worst = std::max(worst, std::abs(geo::rssi_distance_m(geo::RssiSample(w[0], w[1])) - w[2]));
  }
  ok = ok && worst <= 1e-3;

  // Noiseless scan: the SET stands d metres east of a tag on the equator.
  sig::LinkStore links([] { return sig::Timestamp{0}; });
  sig::Signer signer(sig::MapUrlBuilder(), links);
  std::vector<supl::Beacon> tag{supl::Beacon("tag", GeoPoint(0, 0), -59.0)};
  supl::CollectingSink sink;
  double scan_error = 0.0;
  int scanned = 0;
  for (double d : {0.5, 1.0, 2.0, 3.5, 4.9}) {
    supl::Device set{"set", supl::Path::stationary(GeoPoint(
                                0, d / (geo::kEarthRadiusKm * 1000.0) * 180.0 / std::numbers::pi)),
                     "wifi:venue"};
    supl::authorize_dslp(set,
                         supl::DslpServer{"venue", supl::Geofence::circle(GeoPoint(0, 0), 100),
                                          "wifi:venue"},
                         supl::HomeSlp(), sec(0));
    supl::ProximityScanner fresh(signer);
    const auto sent = fresh.scan(set, sec(1), tag, 5.0, sink);
    if (sent.size() != 1) return {false, fmt::format("scan at {} m sent {}", d, sent.size())};
    const double true_m = geo::haversine_m(set.path.position_at(sec(1)), GeoPoint(0, 0));
    scan_error = std::max(scan_error, std::abs(sent[0].estimated_m - true_m));
    ++scanned;
  }
  ok = ok && scan_error <= 1e-9;
  return {ok, fmt::format("identity exact, worst worked-example error {:.2e} m (tol 1e-3), "
                          "worst scan error {:.2e} m over {} scans (tol 1e-9)",
                          worst, scan_error, scanned)};
}

// 4 -------------------------------------------------------------------------

bool legal_history(const supl::SuplSession& s) {
  const auto& h = s.history();
  if (h.front() != supl::SessionState::IDLE) return false;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (!supl::is_legal_transition(h[i - 1], h[i], s.trigger().has_value())) return false;
  }
  return true;
}

Outcome supl_state_machine() {
  using K = supl::MessageKind;
  std::mt19937_64 rng(20164);
  std::uniform_real_distribution<double> drop(0.0, 0.9);
  int illegal = 0, unterminated = 0, ended = 0;
  const supl::Device set{"set", supl::Path::stationary(GeoPoint(55.7558, 37.6173)), "cell"};
  for (int i = 0; i < 1000; ++i) {
    const supl::LinkParams link{sec(0.1), drop(rng)};
    const auto seed = rng();
    try {
      const auto run = i % 2 == 0 ? supl::run_set_initiated(set, "slp", link, seed)
                                  : supl::run_network_initiated(set, "slp", link, seed);
      if (!legal_history(run.session)) ++illegal;
      if (!supl::is_terminal(run.session.state())) ++unterminated;
      if (run.session.state() == supl::SessionState::ENDED) ++ended;
    } catch (const std::logic_error&) {
      ++illegal;
    }
  }
  const auto golden = supl::run_set_initiated(set, "slp");
  std::vector<K> kinds;
  for (const auto& r : golden.trace) kinds.push_back(r.kind);
  const bool golden_ok =
      kinds == std::vector<K>{K::START, K::RESPONSE, K::POS_INIT, K::POS, K::POS, K::END} &&
      golden.session.state() == supl::SessionState::ENDED;
  return {illegal == 0 && unterminated == 0 && golden_ok,
          fmt::format("1000 runs: {} illegal, {} non-terminal, {} ended; golden trace {}",
                      illegal, unterminated, ended, golden_ok ? "matches" : "differs")};
}

// 5 -------------------------------------------------------------------------

// Independent membership test for a circular fence.
bool inside(const GeoPoint& c, double r_m, const GeoPoint& p) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (p.lat() - c.lat()) * kRad, dlon = (p.lon() - c.lon()) * kRad;
  const double a = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(c.lat() * kRad) * std::cos(p.lat() * kRad) *
                       std::pow(std::sin(dlon / 2), 2);
  return 2.0 * 6371000.0 * std::asin(std::min(1.0, std::sqrt(a))) <= r_m;
}

Outcome triggers() {
  const supl::Device set{"set", supl::Path::stationary(GeoPoint(55.7558, 37.6173)), "cell"};
  const auto periodic = supl::run_triggered(set, "slp", supl::TriggerSpec::periodic(sec(10), 3),
                                            set.path);
  bool periodic_ok = periodic.reports.size() == 3;
  for (std::size_t i = 0; periodic_ok && i < 3; ++i) {
    const auto& r = std::get<supl::ReportPayload>(periodic.reports[i].payload);
    periodic_ok = r.fix.timestamp == sec(10.0 * static_cast<double>(i + 1));
  }

  std::mt19937_64 rng(20165);
  std::uniform_real_distribution<double> jitter(-0.004, 0.004);
  std::uniform_int_distribution<int> samples(2, 15);
  std::bernoulli_distribution enter(0.5);
  const GeoPoint center(55.7558, 37.6173);
  const double radius = 250.0;
  int mismatches = 0, expected_total = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<supl::PathSample> pts;
    const int n = samples(rng);
    for (int k = 0; k < n; ++k) {
      pts.push_back({sec(5.0 * k), GeoPoint(center.lat() + jitter(rng), center.lon() + jitter(rng))});
    }
    const bool on_enter = enter(rng);
    int expected = 0;
    for (int k = 1; k < n; ++k) {
      const bool was = inside(center, radius, pts[k - 1].point);
      const bool is = inside(center, radius, pts[k].point);
      if (on_enter ? (!was && is) : (was && !is)) ++expected;
    }
    expected_total += expected;
    const auto run = supl::run_triggered(
        set, "slp",
        supl::TriggerSpec::area_event(supl::Geofence::circle(center, radius),
                                      on_enter ? supl::AreaEventType::enter
                                               : supl::AreaEventType::leave),
        supl::Path(pts));
    if (static_cast<int>(run.reports.size()) != expected) ++mismatches;
  }
  return {periodic_ok && mismatches == 0,
          fmt::format("periodic reports {} at 10/20/30 s: {}; area counts {} mismatches on 100 "
                      "paths ({} events expected)",
                      periodic.reports.size(), periodic_ok ? "yes" : "no", mismatches,
                      expected_total)};
}

// 6 -------------------------------------------------------------------------

Outcome dslp_conjunction() {
  const GeoPoint venue(55.7558, 37.6173);
  supl::Device set{"set", supl::Path::stationary(venue), "wifi:venue"};
  const auto grant = supl::authorize_dslp(
      set, supl::DslpServer{"venue", supl::Geofence::circle(venue, 300), "wifi:venue"},
      supl::HomeSlp(), sec(0));
  int wrong = 0;
  for (int mask = 0; mask < 8; ++mask) {
    const bool area = mask & 1, network = mask & 2, window = mask & 4;
    const bool allowed = supl::dslp_access_allowed(
        grant, area ? venue : GeoPoint(55.80, 37.6173), network ? "wifi:venue" : "cell:other",
        window ? sec(1800) : sec(7200));
    if (allowed != (area && network && window)) ++wrong;
  }
  return {wrong == 0, fmt::format("{} of 8 combinations wrong", wrong)};
}

// 7 -------------------------------------------------------------------------

Outcome sign_pipeline() {
  const auto dir = scratch_dir("sign");
  const auto store = (dir / "links.log").string();
  std::ostringstream out, err;
  const int code = cli::run({"--store", store, "--now", "1000", "sign", "57.64911", "10.40744",
                             "--level", "city", "--channel", "sms", "--text", "meet me here"},
                            out, err);
  if (code != 0) return {false, "sign exited " + std::to_string(code) + ": " + err.str()};
  std::string uri = out.str();
  uri.pop_back();
  const std::string scheme = "sms:?body=";
  if (uri.rfind(scheme, 0) != 0) return {false, "not an sms URI: " + uri};
  const std::string body = sig::percent_decode(uri.substr(scheme.size()));
  const std::size_t chars = sig::utf8_length(body);

  // Follow the short link to the map URL and read the marker back.
  const auto slash = body.rfind('/');
  const sig::LinkStore links(fs::path(store), [] { return sig::Timestamp{0}; });
  const auto target = links.resolve(body.substr(slash + 1));
  if (!target) return {false, "short link does not resolve"};
  const auto at = target->find("markers=");
  double lat = 0, lon = 0;
  if (at == std::string::npos ||
      std::sscanf(target->c_str() + at, "markers=%lf,%lf", &lat, &lon) != 2) {
    return {false, "no marker in " + *target};
  }
  // Cell u4pru: lat [57.6123046875, 57.65625], lon [10.37109375, 10.4150390625].
  const double want_lat = 57.63427734375, want_lon = 10.39306640625;
  const bool located = std::abs(lat - want_lat) <= 5e-7 && std::abs(lon - want_lon) <= 5e-7;
  fs::remove_all(dir);
  return {chars <= 140 && located,
          fmt::format("body {} chars (limit 140), marker {:.6f},{:.6f} vs u4pru center "
                      "{:.6f},{:.6f}",
                      chars, lat, lon, want_lat, want_lon)};
}

// 8 -------------------------------------------------------------------------

Outcome determinism() {
  const auto dir = scratch_dir("determinism");
  int compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(GEOMSG_SCENARIO_DIR)) {
    if (entry.path().extension() != ".scn") continue;
    for (const char* seed : {"1", "7", "1234"}) {
      std::string traces[2];
      for (int k = 0; k < 2; ++k) {
        const auto trace = dir / fmt::format("trace{}.txt", k);
        std::ostringstream out, err;
        cli::run({"simulate", entry.path().string(), "--seed", seed, "--trace-out",
                  trace.string()},
                 out, err);
        traces[k] = slurp(trace);
      }
      ++compared;
      if (traces[0] != traces[1]) ++differing;
    }
  }
  fs::remove_all(dir);
  return {compared > 0 && differing == 0,
          fmt::format("{} scenario/seed pairs re-run, {} trace files differ", compared,
                      differing)};
}

// 9 -------------------------------------------------------------------------

Outcome cache_gating() {
  cell::FixCache cache;
  cache.register_device("set");
  int produced = 0;
  std::mt19937_64 rng(20169);
  std::uniform_real_distribution<double> wiggle(0.0, 24.9);
  for (int i = 0; i < 100; ++i) {
    cache.get_fix("set", cell::MovementSignal(wiggle(rng)),
                  [&] {
                    ++produced;
                    return cell::Fix{GeoPoint(55.7558, 37.6173), sec(i), cell::FixSource::supl};
                  },
                  sec(i));
  }
  return {produced == 1, fmt::format("producer invoked {} times across 100 calls", produced)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"geohash oracle equivalence", geohash_oracle_equivalence},
      {"geohash containment and prefix nesting", geohash_containment_and_nesting},
      {"rssi distance formulas", rssi_formulas},
      {"supl state machine under loss", supl_state_machine},
      {"periodic and area triggers", triggers},
      {"d-slp access conjunction", dslp_conjunction},
      {"sign pipeline at city level", sign_pipeline},
      {"scenario determinism", determinism},
      {"fix cache gating", cache_gating},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome{false, ""};
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << fmt::format("{} {} {}: {}\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                             criteria[i].first, outcome.detail);
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures,
                           criteria.size());
  return failures == 0 ? 0 : 1;
}
