#include <random>
#include <set>

#include <gtest/gtest.h>

#include "geomsg/error.hpp"
#include "geomsg/geo/distance.hpp"
#include "geomsg/supl/dslp.hpp"
#include "geomsg/supl/session.hpp"
#include "geomsg/supl/simulation.hpp"

namespace geomsg::supl {
namespace {

using geo::GeoPoint;
using K = MessageKind;
using S = SessionState;

SimTime sec(double s) { return SimTime::from_seconds(s); }

Device stationary_set(const std::string& id = "set", GeoPoint p = GeoPoint(55.7558, 37.6173)) {
  return Device{id, Path::stationary(p), "cell:250-01"};
}

std::vector<K> kinds(const std::vector<TraceRecord>& trace) {
  std::vector<K> out;
  for (const auto& r : trace) out.push_back(r.kind);
  return out;
}

// Replays a session's recorded history against the transition table.
bool history_is_legal(const SuplSession& s) {
  const auto& h = s.history();
  if (h.empty() || h.front() != S::IDLE) return false;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (!is_legal_transition(h[i - 1], h[i], s.trigger().has_value())) return false;
  }
  return true;
}

TEST(TransitionTable, StandardChain) {
  EXPECT_TRUE(is_legal_transition(S::IDLE, S::START_SENT, false));
  EXPECT_TRUE(is_legal_transition(S::START_SENT, S::RESPONSE_RECEIVED, false));
  EXPECT_TRUE(is_legal_transition(S::RESPONSE_RECEIVED, S::POS_INIT_SENT, false));
  EXPECT_TRUE(is_legal_transition(S::POS_INIT_SENT, S::POS_IN_PROGRESS, false));
  EXPECT_TRUE(is_legal_transition(S::POS_IN_PROGRESS, S::ENDED, false));
  EXPECT_FALSE(is_legal_transition(S::IDLE, S::ENDED, false));
  EXPECT_FALSE(is_legal_transition(S::START_SENT, S::POS_INIT_SENT, false));
}

TEST(TransitionTable, TriggerOnlyForTriggeredSessions) {
  EXPECT_FALSE(is_legal_transition(S::RESPONSE_RECEIVED, S::TRIGGER_ACTIVE, false));
  EXPECT_TRUE(is_legal_transition(S::RESPONSE_RECEIVED, S::TRIGGER_ACTIVE, true));
  EXPECT_TRUE(is_legal_transition(S::TRIGGER_ACTIVE, S::ENDED, true));
}

TEST(TransitionTable, TerminalStatesAbsorb) {
  constexpr S all[] = {S::IDLE, S::START_SENT, S::RESPONSE_RECEIVED, S::POS_INIT_SENT,
                       S::POS_IN_PROGRESS, S::TRIGGER_ACTIVE, S::ENDED, S::FAILED};
  for (S to : all) {
    EXPECT_FALSE(is_legal_transition(S::ENDED, to, true));
    EXPECT_FALSE(is_legal_transition(S::FAILED, to, true));
  }
  for (S from : all) {
    if (!is_terminal(from)) EXPECT_TRUE(is_legal_transition(from, S::FAILED, false));
  }
}

TEST(TransitionTable, SessionRejectsIllegalMove) {
  SuplSession s("sid-1", "set", SessionMode::set_initiated);
  EXPECT_THROW(s.transition(S::ENDED), std::logic_error);
  s.transition(S::START_SENT);
  s.fail("gone");
  EXPECT_EQ(s.state(), S::FAILED);
  EXPECT_EQ(s.failed_in(), S::START_SENT);
  EXPECT_THROW(s.transition(S::RESPONSE_RECEIVED), std::logic_error);
}

TEST(SimNet, TraceFormat) {
  EXPECT_EQ(format_trace_record({sec(10.2), "set", "slp", K::START, "sid-1", false}),
            "t=10.200 set->slp START sid-1");
}

TEST(SimNet, UniformIsInUnitInterval) {
  SimNet net({}, 42);
  for (int i = 0; i < 10000; ++i) {
    const double u = net.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SimNet, EventsFireInTimeThenInsertionOrder) {
  SimNet net;
  std::vector<int> order;
  net.schedule_at(sec(2), [&] { order.push_back(3); });
  net.schedule_at(sec(1), [&] { order.push_back(1); });
  net.schedule_at(sec(1), [&] { order.push_back(2); });
  const auto cancelled = net.schedule_at(sec(1.5), [&] { order.push_back(99); });
  net.cancel(cancelled);
  net.run();
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(net.now(), sec(2));
}

TEST(SimNet, RejectsInvalidDropProbability) {
  EXPECT_THROW(SimNet(LinkParams{sec(0.1), 1.5}), Error);
  SimNet net;
  EXPECT_THROW(net.set_link("a", "b", LinkParams{sec(0.1), -0.1}), Error);
}

TEST(SetInitiated, GoldenTraceWithoutLoss) {
  const auto run = run_set_initiated(stationary_set(), "slp");
  EXPECT_EQ(kinds(run.trace),
            (std::vector<K>{K::START, K::RESPONSE, K::POS_INIT, K::POS, K::POS, K::END}));
  EXPECT_EQ(run.session.state(), S::ENDED);
  EXPECT_EQ(run.session.history(),
            (std::vector<S>{S::IDLE, S::START_SENT, S::RESPONSE_RECEIVED, S::POS_INIT_SENT,
                            S::POS_IN_PROGRESS, S::ENDED}));
  EXPECT_EQ(run.trace.front().from, "set");
  EXPECT_EQ(run.trace[1].from, "slp");
  EXPECT_EQ(run.trace.back().from, "slp");
  EXPECT_EQ(run.trace.back().time, sec(0.5));
}

TEST(SetInitiated, FixEqualsTruePosition) {
  const GeoPoint truth(48.8584, 2.2945);
  const auto run = run_set_initiated(stationary_set("set", truth), "slp");
  ASSERT_TRUE(run.session.result());
  EXPECT_EQ(run.session.result()->point, truth);
  EXPECT_EQ(run.session.result()->source, cell::FixSource::supl);
}

TEST(SetInitiated, TotalLossFailsAfterThreeAttempts) {
  const auto run = run_set_initiated(stationary_set(), "slp", LinkParams{sec(0.1), 1.0});
  EXPECT_EQ(run.session.state(), S::FAILED);
  EXPECT_EQ(run.session.failed_in(), S::START_SENT);
  ASSERT_EQ(run.trace.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(run.trace[i].kind, K::START);
    EXPECT_EQ(run.trace[i].time, sec(10.0 * static_cast<double>(i)));
    EXPECT_TRUE(run.trace[i].dropped);
  }
  EXPECT_NE(run.session.failure().find("START"), std::string::npos);
}

TEST(SetInitiated, SameSeedSameTrace) {
  const LinkParams lossy{sec(0.1), 0.3};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SuplSimulation a(lossy, seed), b(lossy, seed);
    for (auto* sim : {&a, &b}) {
      sim->add_device(stationary_set());
      sim->add_slp("slp");
      sim->start_set_initiated("set", "slp");
      sim->start_set_initiated("set", "slp", sec(3));
      sim->run();
    }
    EXPECT_EQ(a.net().trace_text(), b.net().trace_text());
  }
}

TEST(SetInitiated, RoundCountVariants) {
  for (int k : {1, 3, 4}) {
    ProtocolParams protocol;
    protocol.pos_rounds = k;
    const auto run = run_set_initiated(stationary_set(), "slp", {}, 1, protocol);
    EXPECT_EQ(run.session.state(), S::ENDED) << k;
    std::vector<K> expected{K::START, K::RESPONSE, K::POS_INIT};
    for (int i = 0; i < k; ++i) expected.push_back(K::POS);
    expected.push_back(K::END);
    EXPECT_EQ(kinds(run.trace), expected) << k;
    ASSERT_TRUE(run.session.result());
  }
}

TEST(SetInitiated, RetransmissionRecoversFromOneLoss) {
  SuplSimulation sim;
  sim.add_device(stationary_set());
  sim.add_slp("slp");
  // Drop only the first RESPONSE: the SET repeats START and the SLP
  // repeats its reply.
  sim.net().set_link("slp", "set", LinkParams{sec(0.1), 1.0});
  sim.net().schedule_at(sec(5), [&] { sim.net().set_link("slp", "set", LinkParams{}); });
  const auto sid = sim.start_set_initiated("set", "slp");
  sim.run();
  EXPECT_EQ(sim.session(sid).state(), S::ENDED);
  const auto k = kinds(sim.net().trace());
  EXPECT_EQ(std::count(k.begin(), k.end(), K::START), 2);
  EXPECT_EQ(sim.net().trace()[2].time, sec(10));
}

TEST(SetInitiated, UnexpectedMessageIsProtocolViolation) {
  SuplSimulation sim;
  sim.add_device(stationary_set());
  sim.add_slp("slp");
  sim.net().attach("rogue", [](const std::string&, const SuplMessage&) {});
  const auto sid = sim.start_set_initiated("set", "slp");
  sim.net().schedule_at(sec(0.05), [&] {
    sim.net().send("rogue", "set", SuplMessage{sid, K::REPORT, ReportPayload{}});
  });
  sim.run();
  const auto& s = sim.session(sid);
  EXPECT_EQ(s.state(), S::FAILED);
  EXPECT_EQ(s.failed_in(), S::START_SENT);
  EXPECT_NE(s.failure().find("protocol violation"), std::string::npos);
}

TEST(NetworkInitiated, GoldenTrace) {
  const auto run = run_network_initiated(stationary_set(), "slp");
  EXPECT_EQ(kinds(run.trace), (std::vector<K>{K::INIT_PUSH, K::START, K::RESPONSE,
                                              K::POS_INIT, K::POS, K::POS, K::END}));
  EXPECT_EQ(run.session.state(), S::ENDED);
  EXPECT_EQ(run.session.mode(), SessionMode::network_initiated);
}

TEST(NetworkInitiated, LostPushFailsWithoutContactingSet) {
  SuplSimulation sim;
  sim.add_device(stationary_set());
  sim.add_slp("slp");
  sim.net().set_link("slp", "set", LinkParams{sec(0.1), 1.0});
  const auto sid = sim.start_network_initiated("set", "slp");
  sim.run();
  const auto& s = sim.session(sid);
  EXPECT_EQ(s.state(), S::FAILED);
  EXPECT_EQ(s.history(), (std::vector<S>{S::IDLE, S::FAILED}));
  const auto k = kinds(sim.net().trace());
  EXPECT_EQ(k, (std::vector<K>{K::INIT_PUSH, K::INIT_PUSH, K::INIT_PUSH}));
}

TEST(LossyRuns, AlwaysTerminalAndLegal) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> drop(0.0, 0.9);
  for (int i = 0; i < 200; ++i) {
    const LinkParams link{sec(0.1), drop(rng)};
    const auto a = run_set_initiated(stationary_set(), "slp", link, rng());
    const auto b = run_network_initiated(stationary_set(), "slp", link, rng());
    for (const auto* run : {&a, &b}) {
      EXPECT_TRUE(is_terminal(run->session.state()));
      EXPECT_TRUE(history_is_legal(run->session));
      if (run->session.state() == S::ENDED) EXPECT_TRUE(run->session.result());
    }
  }
}

TEST(Triggers, PeriodicReportsAtBoundaries) {
  const auto path = Path::stationary(GeoPoint(55.7558, 37.6173));
  const auto run = run_triggered(stationary_set(), "slp", TriggerSpec::periodic(sec(10), 3), path);
  EXPECT_EQ(run.session.state(), S::ENDED);
  ASSERT_EQ(run.reports.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    const auto& r = std::get<ReportPayload>(run.reports[i].payload);
    EXPECT_EQ(r.sequence, i + 1);
    EXPECT_EQ(r.fix.timestamp, sec(10.0 * (i + 1)));
  }
  EXPECT_EQ(kinds(run.trace).front(), K::TRIGGERED_START);
  EXPECT_EQ(kinds(run.trace)[1], K::TRIGGERED_RESPONSE);
  EXPECT_EQ(kinds(run.trace).back(), K::END);
  EXPECT_TRUE(history_is_legal(run.session));
}

TEST(Triggers, AreaEnterFiresOnce) {
  const GeoPoint center(55.7558, 37.6173);
  const auto fence = Geofence::circle(center, 200);
  const Path path({{sec(0), GeoPoint(55.7500, 37.6173)},
                   {sec(30), GeoPoint(55.7558, 37.6173)},
                   {sec(60), GeoPoint(55.7620, 37.6173)}});
  const auto enter = run_triggered(stationary_set(), "slp",
                                   TriggerSpec::area_event(fence, AreaEventType::enter), path);
  ASSERT_EQ(enter.reports.size(), 1u);
  EXPECT_EQ(std::get<ReportPayload>(enter.reports[0].payload).fix.timestamp, sec(30));
  const auto leave = run_triggered(stationary_set(), "slp",
                                   TriggerSpec::area_event(fence, AreaEventType::leave), path);
  EXPECT_EQ(leave.reports.size(), 1u);
  EXPECT_EQ(leave.session.state(), S::ENDED);
}

TEST(Triggers, LeaveWithoutEverBeingInside) {
  const auto fence = Geofence::circle(GeoPoint(0, 0), 100);
  const Path path({{sec(0), GeoPoint(10, 10)}, {sec(20), GeoPoint(10.5, 10.5)}});
  const auto run = run_triggered(stationary_set(), "slp",
                                 TriggerSpec::area_event(fence, AreaEventType::leave), path);
  EXPECT_TRUE(run.reports.empty());
  EXPECT_EQ(run.session.state(), S::ENDED);
}

TEST(Triggers, InvalidSpecs) {
  EXPECT_THROW(TriggerSpec::periodic(sec(0), 3), Error);
  EXPECT_THROW(TriggerSpec::periodic(sec(10), 0), Error);
  EXPECT_THROW(Geofence::circle(GeoPoint(0, 0), 0), Error);
  EXPECT_THROW(run_triggered(stationary_set(), "slp", TriggerSpec::periodic(sec(10), 1), Path()),
               Error);
}

TEST(Triggers, GeohashFence) {
  const auto fence = Geofence::geohash_prefix("u4pru");
  EXPECT_TRUE(fence.contains(GeoPoint(57.64911, 10.40744)));
  EXPECT_FALSE(fence.contains(GeoPoint(57.70, 10.40744)));
}

TEST(PathModel, InterpolatesAndClamps) {
  const Path path({{sec(10), GeoPoint(0, 0)}, {sec(20), GeoPoint(10, 20)}});
  EXPECT_EQ(path.position_at(sec(0)), GeoPoint(0, 0));
  EXPECT_EQ(path.position_at(sec(15)), GeoPoint(5, 10));
  EXPECT_EQ(path.position_at(sec(99)), GeoPoint(10, 20));
  EXPECT_THROW(Path({{sec(10), GeoPoint(0, 0)}, {sec(10), GeoPoint(1, 1)}}), Error);
}

class Dslp : public ::testing::Test {
 protected:
  const GeoPoint mall{55.7558, 37.6173};
  DslpServer server{"mall-dslp", Geofence::circle(mall, 300), "wifi:mall"};
  HomeSlp hslp;
  Device set{"set", Path::stationary(mall), "wifi:mall"};
};

TEST_F(Dslp, GrantWindowStartsAtRequest) {
  const auto grant = authorize_dslp(set, server, hslp, sec(100));
  EXPECT_EQ(grant.dslp_id, "mall-dslp");
  EXPECT_EQ(grant.window_start, sec(100));
  EXPECT_EQ(grant.window_end, sec(3700));
  ASSERT_TRUE(set.grant);
  EXPECT_EQ(set.grant->dslp_id, "mall-dslp");
}

TEST_F(Dslp, DiscoveryFailsOutsideServiceArea) {
  set.path = Path::stationary(GeoPoint(0, 0));
  try {
    authorize_dslp(set, server, hslp, sec(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::discovery);
  }
  EXPECT_FALSE(set.grant);
}

TEST_F(Dslp, HomeServerDenial) {
  hslp.deny("set", "mall-dslp");
  try {
    authorize_dslp(set, server, hslp, sec(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::authorization);
  }
  EXPECT_FALSE(set.grant);
}

TEST_F(Dslp, AccessIsConjunctionOfAllThreeConditions) {
  const auto grant = authorize_dslp(set, server, hslp, sec(0));
  const GeoPoint outside(55.80, 37.6173);
  for (int mask = 0; mask < 8; ++mask) {
    const bool in_area = mask & 1, on_network = mask & 2, in_window = mask & 4;
    const bool allowed = dslp_access_allowed(grant, in_area ? mall : outside,
                                             on_network ? "wifi:mall" : "cell:250-01",
                                             in_window ? sec(60) : sec(3601));
    EXPECT_EQ(allowed, in_area && on_network && in_window) << mask;
  }
}

}  // namespace
}  // namespace geomsg::supl
