#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "geomsg/sim_time.hpp"
#include "geomsg/supl/message.hpp"

namespace geomsg::supl {

struct LinkParams {
  SimTime delay = SimTime::from_seconds(0.1);
  double drop_probability = 0.0;
};

// One transmission attempt, recorded at send time whether or not the
// datagram survives the link.
struct TraceRecord {
  SimTime time;
  std::string from;
  std::string to;
  MessageKind kind = MessageKind::START;
  std::string session_id;
  bool dropped = false;
};

// "t=<time> <from>-><to> <kind> <session_id>"
std::string format_trace_record(const TraceRecord& record);

// Discrete-event simulator for an unreliable datagram service. Events fire
// in (time, insertion order); all randomness comes from one seeded engine,
// so a run is a pure function of its seed and inputs.
class SimNet {
 public:
  using Handler = std::function<void(const std::string& from, const SuplMessage&)>;
  using TimerId = std::uint64_t;

  explicit SimNet(LinkParams defaults = {}, std::uint64_t seed = 1);

  void set_link(const std::string& from, const std::string& to, LinkParams params);
  const LinkParams& link(const std::string& from, const std::string& to) const;

  void attach(const std::string& node, Handler handler);
  bool attached(const std::string& node) const;

  void send(const std::string& from, const std::string& to, SuplMessage message);

  TimerId schedule_at(SimTime at, std::function<void()> action);
  TimerId schedule_in(SimTime delay, std::function<void()> action);
  void cancel(TimerId id);

  // Runs one event; false when the queue is empty.
  bool step();
  // Runs until the queue drains or `max_events` fire. Returns events fired.
  std::size_t run(std::size_t max_events = 10'000'000);
  bool idle() const { return queue_.empty(); }

  SimTime now() const { return now_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::string trace_text() const;

  // Uniform in [0, 1), from the bit pattern so it does not depend on the
  // standard library's distribution implementation.
  double uniform();

  std::string next_session_id();

 private:
  struct Event {
    SimTime at;
    std::uint64_t seq;
    TimerId id;
    std::function<void()> action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  LinkParams defaults_;
  std::map<std::pair<std::string, std::string>, LinkParams> links_;
  std::map<std::string, Handler> nodes_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::set<TimerId> cancelled_;
  std::mt19937_64 rng_;
  std::vector<TraceRecord> trace_;
  SimTime now_;
  std::uint64_t seq_ = 0;
  TimerId next_timer_ = 1;
  std::uint64_t next_session_ = 1;
};

}  // namespace geomsg::supl
