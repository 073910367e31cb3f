#include "cli.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "geomsg/cell/cell_db.hpp"
#include "geomsg/cell/fix_cache.hpp"
#include "geomsg/config.hpp"
#include "geomsg/dyn/flow_registry.hpp"
#include "geomsg/dyn/positioning.hpp"
#include "geomsg/error.hpp"
#include "geomsg/geo/geohash.hpp"
#include "geomsg/sig/compose.hpp"
#include "geomsg/sig/link_store.hpp"
#include "geomsg/sig/signature.hpp"
#include "geomsg/supl/scenario.hpp"

namespace geomsg::cli {
namespace {

// Usage-level failure detected after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string store_path;
  std::string flow_path;
  std::optional<double> now;
};

struct GeohashArgs {
  std::vector<std::string> operands;
  int length = geo::kMaxGeohashLength;
};

struct SignArgs {
  double lat = 0;
  double lon = 0;
  std::string level = "exact";
  std::string channel = "sms";
  std::string kind = "map";
  std::string text;
};

struct ResolveArgs {
  std::int64_t mcc = 0, mnc = 0, lac = 0, cid = 0;
  std::string db;
  std::string fixture;
};

struct SimulateArgs {
  std::string scenario;
  std::string trace_out;
  std::optional<std::uint64_t> seed;
};

struct ClickArgs {
  std::string code;
  std::vector<double> at;
};

struct FlowArgs {
  std::vector<std::string> operands;
  std::string devices;
};

Config load(const Globals& g) {
  Config config = g.config_path.empty() ? Config{} : load_config(g.config_path);
  if (!g.store_path.empty()) config.link_store_path = g.store_path;
  if (!g.flow_path.empty()) config.flow_store_path = g.flow_path;
  config.validate();
  return config;
}

sig::Clock clock_for(const Globals& g) {
  if (!g.now) return sig::system_clock();
  const auto t = static_cast<sig::Timestamp>(*g.now);
  return [t] { return t; };
}

SimTime sim_now(const Globals& g) { return SimTime::from_seconds(g.now.value_or(0.0)); }

sig::MapUrlBuilder maps_for(const Config& c) {
  return sig::MapUrlBuilder(c.map_url_template, c.map_zoom);
}

int cmd_geohash(const std::string& action, const GeohashArgs& a, std::ostream& out) {
  if (action == "encode") {
    if (a.operands.size() != 2) throw UsageError("geohash encode takes <lat> <lon>");
    double lat = 0, lon = 0;
    try {
      lat = std::stod(a.operands[0]);
      lon = std::stod(a.operands[1]);
    } catch (const std::exception&) {
      throw UsageError("geohash encode: coordinates must be numbers");
    }
    if (a.length < 1 || a.length > geo::kMaxGeohashLength) {
      throw Error(Errc::validation,
                  fmt::format("length must be in 1..{}", geo::kMaxGeohashLength));
    }
    out << geo::geohash_encode(geo::GeoPoint(lat, lon), a.length).code() << '\n';
    return kExitOk;
  }
  if (a.operands.size() != 1) throw UsageError("geohash decode takes <code>");
  const auto cell = geo::geohash_decode(a.operands[0]);
  const auto& b = cell.bbox();
  fmt::print(out, "lat [{:.6f},{:.6f}] lon [{:.6f},{:.6f}]\n", b.lat_min, b.lat_max,
             b.lon_min, b.lon_max);
  out << "center " << geo::format_coords(cell.center()) << '\n';
  return kExitOk;
}

int cmd_sign(const Globals& g, const SignArgs& a, std::ostream& out) {
  const Config config = load(g);
  sig::LinkStore links(config.link_store_path, clock_for(g));
  sig::Signer signer(maps_for(config), links,
                     sig::Signer::Options{config.short_url_base, config.landing_url_template});
  const auto signature = signer.sign(geo::GeoPoint(a.lat, a.lon),
                                     geo::parse_precision_level(a.level),
                                     sig::parse_signature_kind(a.kind));
  out << sig::compose_message(sig::parse_channel(a.channel), a.text, signature,
                              config.sms_limit)
      << '\n';
  return kExitOk;
}

int cmd_resolve(const Globals& g, const ResolveArgs& a, std::ostream& out) {
  const Config config = load(g);
  auto fixture = std::make_shared<cell::FixtureResolver>();
  if (!a.fixture.empty()) {
    cell::CellDatabase staging;
    staging.load(a.fixture);
    for (const auto& record : staging.records()) fixture->add(record.identity, record.point);
  }
  cell::CellDatabase db(fixture);
  const std::string db_path = a.db.empty() ? config.cell_db_path.string() : a.db;
  if (!db_path.empty()) db.load(db_path);
  const auto record = db.resolve(cell::CellIdentity::make(a.mcc, a.mnc, a.lac, a.cid));
  out << geo::format_coords(record.point) << ' ' << cell::to_string(record.source) << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  supl::Scenario scenario;
  try {
    scenario = supl::load_scenario(a.scenario);
  } catch (const Error& e) {
    if (e.code() == Errc::parse) throw UsageError(e.what());
    throw;
  }
  if (a.seed) scenario.seed = *a.seed;
  const auto result = supl::run_scenario(scenario);
  if (!a.trace_out.empty()) {
    std::ofstream trace(a.trace_out, std::ios::binary | std::ios::trunc);
    trace << result.trace_text();
    if (!trace.flush()) {
      throw Error(Errc::storage, fmt::format("cannot write trace '{}'", a.trace_out));
    }
  }
  out << result.summary();
  return kExitOk;
}

int cmd_stats(const Globals& g, const std::string& code, std::ostream& out) {
  const Config config = load(g);
  const sig::LinkStore links(config.link_store_path, clock_for(g));
  const auto link = links.find(code);
  if (!link) throw Error(Errc::not_found, fmt::format("unknown short code '{}'", code));
  out << "target: " << link->target << '\n';
  out << "clicks: " << link->clicks.size() << '\n';
  for (const auto& click : link->clicks) {
    out << "  " << click.timestamp;
    if (click.context) out << ' ' << geo::format_coords(*click.context);
    out << '\n';
  }
  return kExitOk;
}

int cmd_click(const Globals& g, const ClickArgs& a, std::ostream& out) {
  if (!a.at.empty() && a.at.size() != 2) throw UsageError("--at takes <lat> <lon>");
  const Config config = load(g);
  sig::LinkStore links(config.link_store_path, clock_for(g));
  std::optional<geo::GeoPoint> context;
  if (a.at.size() == 2) context = geo::GeoPoint(a.at[0], a.at[1]);
  out << "clicks: " << links.record_click(a.code, context) << '\n';
  return kExitOk;
}

void print_flow(const dyn::Flow& f, std::ostream& out) {
  std::string recipients;
  for (const auto& r : f.recipients) {
    if (!recipients.empty()) recipients += ',';
    recipients += r;
  }
  out << f.flow_id << ' ' << f.owner << " -> " << recipients << ' '
      << (f.active ? "active" : "closed") << '\n';
}

int cmd_flow(const Globals& g, const std::string& action, const FlowArgs& a,
             std::ostream& out) {
  const Config config = load(g);
  dyn::FlowRegistry registry(maps_for(config),
                             dyn::FlowRegistry::Options{config.walking_speed_mps, std::nullopt},
                             config.flow_store_path);
  const SimTime now = sim_now(g);

  if (action == "create") {
    if (a.operands.size() < 2) throw UsageError("flow create takes <owner> <recipient>...");
    // The command line is the device roster.
    for (const auto& d : a.operands) registry.register_device(d);
    const std::vector<std::string> recipients(a.operands.begin() + 1, a.operands.end());
    print_flow(registry.create_flow(a.operands[0], recipients, now), out);
    return kExitOk;
  }
  if (action == "close") {
    if (a.operands.size() != 1) throw UsageError("flow close takes <flow_id>");
    print_flow(registry.close_flow(a.operands[0], now), out);
    return kExitOk;
  }
  if (action == "list") {
    for (const auto& f : registry.active_flows(std::nullopt, now)) print_flow(f, out);
    return kExitOk;
  }

  if (a.operands.size() != 2) throw UsageError("flow open takes <flow_id> <viewer>");
  if (a.devices.empty()) throw UsageError("flow open needs --devices <scenario>");
  supl::Scenario roster;
  try {
    roster = supl::load_scenario(a.devices);
  } catch (const Error& e) {
    if (e.code() == Errc::parse) throw UsageError(e.what());
    throw;
  }
  cell::FixCache cache(cell::FixCache::Options{config.movement_threshold_m, std::nullopt});
  supl::ProtocolParams protocol;
  protocol.retransmit_timer = SimTime::from_seconds(config.retransmit_timer_s);
  protocol.max_attempts = config.max_retries;
  protocol.pos_rounds = config.pos_rounds;
  dyn::SimulatedPositioning positioning(
      cache, dyn::SimulatedPositioning::Options{roster.link, config.rng_seed, protocol, "slp"});
  for (const auto& d : roster.devices) {
    registry.register_device(d.id);
    positioning.add_device(d);
  }
  const auto r = registry.open_message(a.operands[0], a.operands[1], now, positioning);
  out << "sender " << geo::format_coords(r.sender_fix.point) << '\n';
  out << "viewer " << geo::format_coords(r.viewer_fix.point) << '\n';
  fmt::print(out, "distance_km {:.6f}\neta_s {:.2f}\n", r.distance_km, r.eta_s);
  out << "map " << r.map_url << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geo-messaging toolkit", "geomsg"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config_path, "Key=value settings file");
  app.add_option("--store", g.store_path, "Link store log (overrides config)");
  app.add_option("--flows", g.flow_path, "Flow registry log (overrides config)");
  app.add_option("--now", g.now, "Fixed clock in seconds for links and flows");

  GeohashArgs geohash;
  auto* gh = app.add_subcommand("geohash", "Encode or decode geohashes");
  gh->require_subcommand(1);
  auto* gh_encode = gh->add_subcommand("encode", "Print the code for <lat> <lon>");
  gh_encode->add_option("coords", geohash.operands, "<lat> <lon>")->required()->expected(2);
  gh_encode->add_option("--len", geohash.length, "Code length, 1..12");
  auto* gh_decode = gh->add_subcommand("decode", "Print the cell of a code");
  gh_decode->add_option("code", geohash.operands, "Geohash")->required()->expected(1);

  SignArgs sign;
  auto* sg = app.add_subcommand("sign", "Build a signed sms:/mailto: message");
  sg->add_option("lat", sign.lat)->required();
  sg->add_option("lon", sign.lon)->required();
  sg->add_option("--level", sign.level, "exact|street|city|area")->capture_default_str();
  sg->add_option("--channel", sign.channel, "sms|email")->capture_default_str();
  sg->add_option("--kind", sign.kind, "map|landing|text")->capture_default_str();
  sg->add_option("--text", sign.text, "Message body");

  ResolveArgs resolve;
  auto* rs = app.add_subcommand("resolve", "Resolve a GSM cell identity");
  rs->add_option("mcc", resolve.mcc)->required();
  rs->add_option("mnc", resolve.mnc)->required();
  rs->add_option("lac", resolve.lac)->required();
  rs->add_option("cid", resolve.cid)->required();
  rs->add_option("--db", resolve.db, "Local cell database CSV (overrides config)");
  rs->add_option("--fixture", resolve.fixture, "CSV served by the offline external resolver");

  SimulateArgs simulate;
  auto* sm = app.add_subcommand("simulate", "Run a SUPL scenario");
  sm->add_option("scenario", simulate.scenario)->required();
  sm->add_option("--trace-out", simulate.trace_out, "Write the message trace here");
  sm->add_option("--seed", simulate.seed, "Override the scenario seed");

  std::string stats_code;
  auto* st = app.add_subcommand("stats", "Click report for a short code");
  st->add_option("code", stats_code)->required();

  ClickArgs click;
  auto* ck = app.add_subcommand("click", "Record a click on a short code");
  ck->add_option("code", click.code)->required();
  ck->add_option("--at", click.at, "Click context <lat> <lon>")->expected(2);

  FlowArgs flow;
  auto* fl = app.add_subcommand("flow", "Dynamic location-sharing flows");
  fl->require_subcommand(1);
  auto* fl_create = fl->add_subcommand("create", "<owner> <recipient>...");
  fl_create->add_option("devices", flow.operands)->required();
  auto* fl_open = fl->add_subcommand("open", "<flow_id> <viewer>");
  fl_open->add_option("operands", flow.operands)->required();
  fl_open->add_option("--devices", flow.devices, "Scenario file defining device paths");
  auto* fl_close = fl->add_subcommand("close", "<flow_id>");
  fl_close->add_option("flow_id", flow.operands)->required()->expected(1);
  auto* fl_list = fl->add_subcommand("list", "Active flows");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gh->parsed()) return cmd_geohash(gh_encode->parsed() ? "encode" : "decode", geohash, out);
    if (sg->parsed()) return cmd_sign(g, sign, out);
    if (rs->parsed()) return cmd_resolve(g, resolve, out);
    if (sm->parsed()) return cmd_simulate(simulate, out);
    if (st->parsed()) return cmd_stats(g, stats_code, out);
    if (ck->parsed()) return cmd_click(g, click, out);
    const char* action = fl_create->parsed() ? "create"
                         : fl_open->parsed() ? "open"
                         : fl_close->parsed() ? "close"
                         : fl_list->parsed() ? "list"
                                             : "";
    return cmd_flow(g, action, flow, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LengthError& e) {
    err << fmt::format("error: message is {} characters, {} over the {}-character limit\n",
                       e.length(), e.overflow(), e.limit());
    return kExitDomain;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace geomsg::cli
