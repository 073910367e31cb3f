#include "geomsg/supl/sim_net.hpp"

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::supl {

std::string format_trace_record(const TraceRecord& record) {
  return fmt::format("t={} {}->{} {} {}", record.time.str(), record.from,
                     record.to, to_string(record.kind), record.session_id);
}

SimNet::SimNet(LinkParams defaults, std::uint64_t seed)
    : defaults_(defaults), rng_(seed) {
  if (!(defaults.drop_probability >= 0.0 && defaults.drop_probability <= 1.0)) {
    throw Error(Errc::validation, "drop probability outside [0, 1]");
  }
  if (defaults.delay < SimTime()) {
    throw Error(Errc::validation, "negative link delay");
  }
}

void SimNet::set_link(const std::string& from, const std::string& to,
                      LinkParams params) {
  if (!(params.drop_probability >= 0.0 && params.drop_probability <= 1.0) ||
      params.delay < SimTime()) {
    throw Error(Errc::validation,
                fmt::format("bad link parameters for {}->{}", from, to));
  }
  links_[{from, to}] = params;
}

const LinkParams& SimNet::link(const std::string& from, const std::string& to) const {
  const auto it = links_.find({from, to});
  return it == links_.end() ? defaults_ : it->second;
}

void SimNet::attach(const std::string& node, Handler handler) {
  nodes_[node] = std::move(handler);
}

bool SimNet::attached(const std::string& node) const {
  return nodes_.contains(node);
}

double SimNet::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

void SimNet::send(const std::string& from, const std::string& to,
                  SuplMessage message) {
  const LinkParams& params = link(from, to);
  // Always draw, so the random stream does not depend on drop settings.
  const bool dropped = uniform() < params.drop_probability;
  trace_.push_back(
      TraceRecord{now_, from, to, message.kind, message.session_id, dropped});
  if (dropped) return;
  schedule_at(now_ + params.delay, [this, from, to, msg = std::move(message)] {
    const auto it = nodes_.find(to);
    if (it != nodes_.end()) it->second(from, msg);
  });
}

SimNet::TimerId SimNet::schedule_at(SimTime at, std::function<void()> action) {
  const TimerId id = next_timer_++;
  queue_.push(Event{std::max(at, now_), seq_++, id, std::move(action)});
  return id;
}

SimNet::TimerId SimNet::schedule_in(SimTime delay, std::function<void()> action) {
  return schedule_at(now_ + delay, std::move(action));
}

void SimNet::cancel(TimerId id) { cancelled_.insert(id); }

bool SimNet::step() {
  while (!queue_.empty()) {
    Event event = queue_.top();
    queue_.pop();
    if (cancelled_.erase(event.id) > 0) continue;
    now_ = event.at;
    event.action();
    return true;
  }
  return false;
}

std::size_t SimNet::run(std::size_t max_events) {
  std::size_t fired = 0;
  while (fired < max_events && step()) ++fired;
  return fired;
}

std::string SimNet::trace_text() const {
  std::string out;
  for (const auto& record : trace_) {
    out += format_trace_record(record);
    out += '\n';
  }
  return out;
}

std::string SimNet::next_session_id() {
  return fmt::format("sid-{}", next_session_++);
}

}  // namespace geomsg::supl
