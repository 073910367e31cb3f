#include "geomsg/supl/simulation.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::supl {
namespace {

using MessageKey = std::pair<MessageKind, int>;

MessageKey key_of(const SuplMessage& msg) { return {msg.kind, msg.ordinal()}; }

}  // namespace

// ---------------------------------------------------------------------------
// SET side

class SuplSimulation::SetAgent {
 public:
  SetAgent(SuplSimulation& sim, Device& device) : sim_(sim), device_(device) {
    sim_.net_.attach(device_.id, [this](const std::string& from, const SuplMessage& msg) {
      on_message(from, msg);
    });
  }

  void begin(SuplSession& session, const std::string& slp) {
    if (is_terminal(session.state()) || contexts_.contains(session.session_id())) {
      return;
    }
    Context& ctx = contexts_[session.session_id()];
    ctx.session = &session;
    ctx.slp = slp;
    ctx.started = sim_.net_.now();
    SuplMessage first{session.session_id(), MessageKind::START, {}};
    if (session.trigger()) {
      first.kind = MessageKind::TRIGGERED_START;
      first.payload = TriggeredStartPayload{device_.capabilities, *session.trigger()};
    } else {
      first.payload = StartPayload{device_.capabilities};
    }
    session.transition(SessionState::START_SENT);
    send_reliable(ctx, std::move(first));
  }

 private:
  struct Context {
    SuplSession* session = nullptr;
    std::string slp;
    SimTime started;
    std::optional<SuplMessage> pending;
    int attempts = 0;
    std::optional<SimNet::TimerId> timer;
    int last_sent_round = 0;
    std::set<MessageKey> seen;
  };

  SimNet& net() { return sim_.net_; }
  int rounds() const { return sim_.protocol_.pos_rounds; }

  geo::GeoPoint here() { return device_.path.position_at(net().now()); }

  void send_once(Context& ctx, SuplMessage msg) {
    net().send(device_.id, ctx.slp, std::move(msg));
  }

  void send_reliable(Context& ctx, SuplMessage msg) {
    ctx.pending = msg;
    ctx.attempts = 1;
    send_once(ctx, std::move(msg));
    arm(ctx);
  }

  void arm(Context& ctx) {
    const std::string sid = ctx.session->session_id();
    ctx.timer = net().schedule_in(sim_.protocol_.retransmit_timer,
                                  [this, sid] { on_timeout(sid); });
  }

  void stop_timer(Context& ctx) {
    if (ctx.timer) net().cancel(*ctx.timer);
    ctx.timer.reset();
    ctx.pending.reset();
  }

  void on_timeout(const std::string& sid) {
    Context& ctx = contexts_.at(sid);
    ctx.timer.reset();
    if (is_terminal(ctx.session->state()) || !ctx.pending) return;
    if (ctx.attempts < sim_.protocol_.max_attempts) {
      ++ctx.attempts;
      send_once(ctx, *ctx.pending);
      arm(ctx);
      return;
    }
    const MessageKind kind = ctx.pending->kind;
    ctx.pending.reset();
    ctx.session->fail(fmt::format("no reply to {} after {} attempts",
                                  to_string(kind), ctx.attempts));
  }

  void violation(Context& ctx, const SuplMessage& msg) {
    stop_timer(ctx);
    ctx.session->fail(fmt::format("protocol violation: unexpected {} in state {}",
                                  to_string(msg.kind),
                                  to_string(ctx.session->state())));
  }

  void on_message(const std::string& from, const SuplMessage& msg) {
    if (msg.kind == MessageKind::INIT_PUSH) {
      on_push(from, msg);
      return;
    }
    const auto it = contexts_.find(msg.session_id);
    if (it == contexts_.end()) return;
    Context& ctx = it->second;
    SuplSession& session = *ctx.session;
    if (is_terminal(session.state())) return;
    if (!ctx.seen.insert(key_of(msg)).second) return;  // retransmitted duplicate

    const bool triggered = session.trigger().has_value();
    switch (session.state()) {
      case SessionState::START_SENT:
        if (!triggered && msg.kind == MessageKind::RESPONSE) {
          stop_timer(ctx);
          session.transition(SessionState::RESPONSE_RECEIVED);
          session.transition(SessionState::POS_INIT_SENT);
          send_reliable(ctx, SuplMessage{session.session_id(), MessageKind::POS_INIT,
                                         PosInitPayload{here()}});
          return;
        }
        if (triggered && msg.kind == MessageKind::TRIGGERED_RESPONSE) {
          stop_timer(ctx);
          session.transition(SessionState::RESPONSE_RECEIVED);
          session.transition(SessionState::TRIGGER_ACTIVE);
          activate_trigger(ctx);
          return;
        }
        break;
      case SessionState::POS_INIT_SENT:
        if (msg.kind == MessageKind::POS && msg.ordinal() == 1) {
          stop_timer(ctx);
          session.transition(SessionState::POS_IN_PROGRESS);
          on_pos(ctx, std::get<PosPayload>(msg.payload), msg);
          return;
        }
        break;
      case SessionState::POS_IN_PROGRESS:
        if (msg.kind == MessageKind::POS && msg.ordinal() == ctx.last_sent_round + 1) {
          stop_timer(ctx);
          on_pos(ctx, std::get<PosPayload>(msg.payload), msg);
          return;
        }
        if (msg.kind == MessageKind::END && ctx.last_sent_round == rounds()) {
          const auto* end = std::get_if<EndPayload>(&msg.payload);
          if (end == nullptr || !end->fix) break;
          stop_timer(ctx);
          session.set_result(*end->fix);
          session.transition(SessionState::ENDED);
          return;
        }
        break;
      default:
        break;
    }
    violation(ctx, msg);
  }

  void on_pos(Context& ctx, const PosPayload& pos, const SuplMessage& msg) {
    SuplSession& session = *ctx.session;
    if (pos.round == rounds()) {
      if (!pos.fix) {
        violation(ctx, msg);
        return;
      }
      session.set_result(*pos.fix);
      send_once(ctx, SuplMessage{session.session_id(), MessageKind::END, EndPayload{}});
      session.transition(SessionState::ENDED);
      return;
    }
    ctx.last_sent_round = pos.round + 1;
    send_reliable(ctx, SuplMessage{session.session_id(), MessageKind::POS,
                                   PosPayload{pos.round + 1, here(), std::nullopt}});
  }

  void on_push(const std::string& from, const SuplMessage& msg) {
    if (contexts_.contains(msg.session_id)) return;
    const auto it = sim_.sessions_.find(msg.session_id);
    if (it == sim_.sessions_.end() || it->second.set_id() != device_.id) return;
    const auto* push = std::get_if<PushPayload>(&msg.payload);
    begin(it->second, push ? push->slp_address : from);
  }

  void activate_trigger(Context& ctx) {
    const std::string sid = ctx.session->session_id();
    const SimTime now = net().now();
    const TriggerSpec& spec = *ctx.session->trigger();

    if (const auto* periodic = spec.as_periodic()) {
      for (int i = 1; i <= periodic->count; ++i) {
        const SimTime boundary = ctx.started + periodic->interval * i;
        const bool last = i == periodic->count;
        net().schedule_at(std::max(boundary, now), [this, sid, i, boundary, last] {
          report(sid, i, boundary, device_.path.position_at(boundary));
          if (last) finish(sid);
        });
      }
      return;
    }

    const auto& area = *spec.as_area_event();
    const auto& samples = device_.path.samples();
    int sequence = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const bool was_in = area.fence.contains(samples[i - 1].point);
      const bool is_in = area.fence.contains(samples[i].point);
      const bool fires = area.on == AreaEventType::enter ? (!was_in && is_in)
                                                         : (was_in && !is_in);
      if (!fires) continue;
      const int seq = ++sequence;
      const PathSample sample = samples[i];
      net().schedule_at(std::max(sample.time, now), [this, sid, seq, sample] {
        report(sid, seq, sample.time, sample.point);
      });
    }
    net().schedule_at(std::max(samples.back().time, now), [this, sid] { finish(sid); });
  }

  void report(const std::string& sid, int sequence, SimTime at, geo::GeoPoint point) {
    Context& ctx = contexts_.at(sid);
    if (is_terminal(ctx.session->state())) return;
    send_once(ctx, SuplMessage{sid, MessageKind::REPORT,
                               ReportPayload{sequence, cell::Fix{point, at,
                                                                 cell::FixSource::supl}}});
  }

  void finish(const std::string& sid) {
    Context& ctx = contexts_.at(sid);
    if (is_terminal(ctx.session->state())) return;
    send_once(ctx, SuplMessage{sid, MessageKind::END, EndPayload{}});
    ctx.session->transition(SessionState::ENDED);
  }

  SuplSimulation& sim_;
  Device& device_;
  std::map<std::string, Context> contexts_;
};

// ---------------------------------------------------------------------------
// SLP side

class SuplSimulation::SlpAgent {
 public:
  SlpAgent(SuplSimulation& sim, std::string name) : sim_(sim), name_(std::move(name)) {
    sim_.net_.attach(name_, [this](const std::string& from, const SuplMessage& msg) {
      on_message(from, msg);
    });
  }

  void push(const std::string& sid, const std::string& set) {
    Context& ctx = contexts_[sid];
    ctx.set = set;
    ctx.pushing = true;
    ctx.push_attempts = 1;
    send_push(sid);
  }

  std::vector<SuplMessage> reports(const std::string& sid) const {
    const auto it = contexts_.find(sid);
    return it == contexts_.end() ? std::vector<SuplMessage>{} : it->second.reports;
  }

 private:
  struct Context {
    std::string set;
    std::optional<MessageKey> last_request;
    std::optional<SuplMessage> last_reply;
    std::set<MessageKey> seen;
    std::optional<geo::GeoPoint> measurement;
    bool pushing = false;
    int push_attempts = 0;
    std::optional<SimNet::TimerId> push_timer;
    std::vector<SuplMessage> reports;
  };

  SimNet& net() { return sim_.net_; }
  int rounds() const { return sim_.protocol_.pos_rounds; }

  void send_push(const std::string& sid) {
    Context& ctx = contexts_.at(sid);
    net().send(name_, ctx.set,
               SuplMessage{sid, MessageKind::INIT_PUSH, PushPayload{name_}});
    ctx.push_timer = net().schedule_in(sim_.protocol_.retransmit_timer,
                                       [this, sid] { on_push_timeout(sid); });
  }

  void on_push_timeout(const std::string& sid) {
    Context& ctx = contexts_.at(sid);
    ctx.push_timer.reset();
    if (!ctx.pushing) return;
    if (ctx.push_attempts < sim_.protocol_.max_attempts) {
      ++ctx.push_attempts;
      send_push(sid);
      return;
    }
    ctx.pushing = false;
    SuplSession& session = sim_.sessions_.at(sid);
    if (!is_terminal(session.state())) {
      session.fail(fmt::format("INIT_PUSH unanswered after {} attempts",
                               ctx.push_attempts));
    }
  }

  void reply(Context& ctx, const SuplMessage& request, SuplMessage msg) {
    ctx.last_request = key_of(request);
    ctx.last_reply = msg;
    net().send(name_, ctx.set, std::move(msg));
  }

  cell::Fix compute_fix(const Context& ctx) {
    return cell::Fix{*ctx.measurement, net().now(), cell::FixSource::supl};
  }

  SuplMessage pos_message(const Context& ctx, const std::string& sid, int round) {
    PosPayload pos{round, std::nullopt, std::nullopt};
    if (round == rounds()) pos.fix = compute_fix(ctx);
    return SuplMessage{sid, MessageKind::POS, pos};
  }

  void on_message(const std::string& from, const SuplMessage& msg) {
    auto it = contexts_.find(msg.session_id);
    if (it == contexts_.end()) {
      if (msg.kind != MessageKind::START && msg.kind != MessageKind::TRIGGERED_START) {
        return;
      }
      it = contexts_.emplace(msg.session_id, Context{}).first;
      it->second.set = from;
    }
    Context& ctx = it->second;
    const MessageKey key = key_of(msg);
    if (ctx.last_request == key && ctx.last_reply) {
      net().send(name_, ctx.set, *ctx.last_reply);
      return;
    }
    if (!ctx.seen.insert(key).second) return;

    const std::string& sid = msg.session_id;
    switch (msg.kind) {
      case MessageKind::START:
        if (ctx.pushing) {
          ctx.pushing = false;
          if (ctx.push_timer) net().cancel(*ctx.push_timer);
          ctx.push_timer.reset();
        }
        reply(ctx, msg, SuplMessage{sid, MessageKind::RESPONSE, {}});
        break;
      case MessageKind::TRIGGERED_START:
        reply(ctx, msg, SuplMessage{sid, MessageKind::TRIGGERED_RESPONSE, {}});
        break;
      case MessageKind::POS_INIT:
        ctx.measurement = std::get<PosInitPayload>(msg.payload).measurement;
        reply(ctx, msg, pos_message(ctx, sid, 1));
        break;
      case MessageKind::POS: {
        const auto& pos = std::get<PosPayload>(msg.payload);
        if (pos.measurement) ctx.measurement = pos.measurement;
        if (!ctx.measurement) break;
        if (pos.round == rounds()) {
          reply(ctx, msg, SuplMessage{sid, MessageKind::END, EndPayload{compute_fix(ctx)}});
        } else {
          reply(ctx, msg, pos_message(ctx, sid, pos.round + 1));
        }
        break;
      }
      case MessageKind::REPORT:
        ctx.reports.push_back(msg);
        break;
      default:
        break;
    }
  }

  SuplSimulation& sim_;
  std::string name_;
  std::map<std::string, Context> contexts_;
};

// ---------------------------------------------------------------------------

SuplSimulation::SuplSimulation(LinkParams link, std::uint64_t seed,
                               ProtocolParams protocol)
    : net_(link, seed), protocol_(protocol) {
  if (protocol_.max_attempts < 1) {
    throw Error(Errc::validation, "max_attempts must be >= 1");
  }
  if (protocol_.pos_rounds < 1) {
    throw Error(Errc::validation, "pos_rounds must be >= 1");
  }
  if (protocol_.retransmit_timer <= SimTime()) {
    throw Error(Errc::validation, "retransmit timer must be > 0");
  }
}

SuplSimulation::~SuplSimulation() = default;

Device& SuplSimulation::add_device(Device device) {
  if (device.id.empty()) throw Error(Errc::validation, "device id is empty");
  if (devices_.contains(device.id) || slp_agents_.contains(device.id)) {
    throw Error(Errc::validation, fmt::format("duplicate node '{}'", device.id));
  }
  const std::string id = device.id;
  Device& stored = devices_.emplace(id, std::move(device)).first->second;
  set_agents_.emplace(id, std::make_unique<SetAgent>(*this, stored));
  return stored;
}

Device& SuplSimulation::device(const std::string& id) {
  const auto it = devices_.find(id);
  if (it == devices_.end()) {
    throw Error(Errc::not_found, fmt::format("unknown device '{}'", id));
  }
  return it->second;
}

void SuplSimulation::add_slp(const std::string& name) {
  if (name.empty()) throw Error(Errc::validation, "SLP name is empty");
  if (devices_.contains(name) || slp_agents_.contains(name)) {
    throw Error(Errc::validation, fmt::format("duplicate node '{}'", name));
  }
  slp_agents_.emplace(name, std::make_unique<SlpAgent>(*this, name));
}

SuplSession& SuplSimulation::new_session(const std::string& set, SessionMode mode,
                                         std::optional<TriggerSpec> trigger) {
  device(set);
  std::string sid = net_.next_session_id();
  return sessions_.emplace(sid, SuplSession(sid, set, mode, std::move(trigger)))
      .first->second;
}

namespace {

template <typename Map>
auto& require_slp(Map& agents, const std::string& slp) {
  const auto it = agents.find(slp);
  if (it == agents.end()) {
    throw Error(Errc::not_found, fmt::format("unknown SLP '{}'", slp));
  }
  return *it->second;
}

}  // namespace

std::string SuplSimulation::start_set_initiated(const std::string& set,
                                                const std::string& slp, SimTime at) {
  require_slp(slp_agents_, slp);
  if (device(set).path.empty()) {
    throw Error(Errc::validation, fmt::format("device '{}' has no position source", set));
  }
  SuplSession& session = new_session(set, SessionMode::set_initiated, std::nullopt);
  SetAgent* agent = set_agents_.at(set).get();
  net_.schedule_at(at, [agent, &session, slp] { agent->begin(session, slp); });
  return session.session_id();
}

std::string SuplSimulation::start_network_initiated(const std::string& set,
                                                    const std::string& slp, SimTime at) {
  SlpAgent& agent = require_slp(slp_agents_, slp);
  if (device(set).path.empty()) {
    throw Error(Errc::validation, fmt::format("device '{}' has no position source", set));
  }
  SuplSession& session = new_session(set, SessionMode::network_initiated, std::nullopt);
  const std::string sid = session.session_id();
  net_.schedule_at(at, [&agent, sid, set] { agent.push(sid, set); });
  return sid;
}

std::string SuplSimulation::start_triggered(const std::string& set,
                                            const std::string& slp,
                                            const TriggerSpec& trigger, SimTime at) {
  require_slp(slp_agents_, slp);
  if (device(set).path.empty()) {
    throw Error(Errc::validation,
                fmt::format("triggered session for '{}' needs a non-empty path", set));
  }
  SuplSession& session = new_session(set, SessionMode::set_initiated, trigger);
  SetAgent* agent = set_agents_.at(set).get();
  net_.schedule_at(at, [agent, &session, slp] { agent->begin(session, slp); });
  return session.session_id();
}

const SuplSession& SuplSimulation::session(const std::string& id) const {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(Errc::not_found, fmt::format("unknown session '{}'", id));
  }
  return it->second;
}

std::vector<std::string> SuplSimulation::session_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, session] : sessions_) ids.push_back(id);
  return ids;
}

std::vector<SuplMessage> SuplSimulation::reports(const std::string& session_id) const {
  for (const auto& [name, agent] : slp_agents_) {
    auto found = agent->reports(session_id);
    if (!found.empty()) return found;
  }
  return {};
}

namespace {

SessionRun collect(SuplSimulation& sim, const std::string& sid) {
  sim.run();
  return SessionRun{sim.session(sid), sim.net().trace(), sim.reports(sid)};
}

}  // namespace

SessionRun run_set_initiated(const Device& set, const std::string& slp,
                             LinkParams link, std::uint64_t seed,
                             ProtocolParams protocol) {
  SuplSimulation sim(link, seed, protocol);
  sim.add_device(set);
  sim.add_slp(slp);
  return collect(sim, sim.start_set_initiated(set.id, slp));
}

SessionRun run_network_initiated(const Device& set, const std::string& slp,
                                 LinkParams link, std::uint64_t seed,
                                 ProtocolParams protocol) {
  SuplSimulation sim(link, seed, protocol);
  sim.add_device(set);
  sim.add_slp(slp);
  return collect(sim, sim.start_network_initiated(set.id, slp));
}

SessionRun run_triggered(const Device& set, const std::string& slp,
                         const TriggerSpec& trigger, const Path& path,
                         LinkParams link, std::uint64_t seed, ProtocolParams protocol) {
  if (path.empty()) throw Error(Errc::validation, "triggered session needs a non-empty path");
  SuplSimulation sim(link, seed, protocol);
  Device moving = set;
  moving.path = path;
  sim.add_device(std::move(moving));
  sim.add_slp(slp);
  return collect(sim, sim.start_triggered(set.id, slp, trigger));
}

}  // namespace geomsg::supl
