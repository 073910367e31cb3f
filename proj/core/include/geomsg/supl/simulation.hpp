#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "geomsg/supl/device.hpp"
#include "geomsg/supl/message.hpp"
#include "geomsg/supl/session.hpp"
#include "geomsg/supl/sim_net.hpp"

namespace geomsg::supl {

struct ProtocolParams {
  SimTime retransmit_timer = SimTime::from_seconds(10);
  int max_attempts = 3;
  // Measurement-exchange rounds after POS_INIT.
  int pos_rounds = 2;
};

// SET and SLP protocol agents on a shared SimNet.
//
// Set-initiated flow, with k measurement rounds:
//
//   SET START -> SLP RESPONSE -> SET POS_INIT -> POS(1) ... POS(k) -> END
//
// POS rounds alternate direction starting with the SLP. The party that
// receives POS(k) answers with END; the fix travels in whichever of POS(k)
// or END the SLP sends last. Every message that expects a reply is
// retransmitted on timeout up to max_attempts; receivers answer a repeated
// request with their previous reply.
//
// Triggered sessions use TRIGGERED_START/TRIGGERED_RESPONSE, then the SET
// sends unacknowledged REPORTs and a closing END.
class SuplSimulation {
 public:
  SuplSimulation(LinkParams link = {}, std::uint64_t seed = 1,
                 ProtocolParams protocol = {});
  ~SuplSimulation();
  SuplSimulation(const SuplSimulation&) = delete;
  SuplSimulation& operator=(const SuplSimulation&) = delete;

  SimNet& net() { return net_; }
  const SimNet& net() const { return net_; }
  const ProtocolParams& protocol() const { return protocol_; }

  Device& add_device(Device device);
  Device& device(const std::string& id);
  void add_slp(const std::string& name);

  // Each returns the new session id; the flow starts at `at`.
  std::string start_set_initiated(const std::string& set, const std::string& slp,
                                  SimTime at = SimTime());
  std::string start_network_initiated(const std::string& set, const std::string& slp,
                                      SimTime at = SimTime());
  // Throws Errc::validation for an empty path.
  std::string start_triggered(const std::string& set, const std::string& slp,
                              const TriggerSpec& trigger, SimTime at = SimTime());

  std::size_t run(std::size_t max_events = 10'000'000) { return net_.run(max_events); }

  const SuplSession& session(const std::string& id) const;
  std::vector<std::string> session_ids() const;
  // REPORTs delivered to the SLP for a triggered session, in arrival order.
  std::vector<SuplMessage> reports(const std::string& session_id) const;

 private:
  class SetAgent;
  class SlpAgent;

  SuplSession& new_session(const std::string& set, SessionMode mode,
                           std::optional<TriggerSpec> trigger);

  SimNet net_;
  ProtocolParams protocol_;
  std::map<std::string, Device> devices_;
  std::map<std::string, SuplSession> sessions_;
  std::map<std::string, std::unique_ptr<SetAgent>> set_agents_;
  std::map<std::string, std::unique_ptr<SlpAgent>> slp_agents_;
};

struct SessionRun {
  SuplSession session;
  std::vector<TraceRecord> trace;
  std::vector<SuplMessage> reports;
};

// One-shot helpers: a fresh simulation with `set` and one SLP named `slp`.
SessionRun run_set_initiated(const Device& set, const std::string& slp,
                             LinkParams link = {}, std::uint64_t seed = 1,
                             ProtocolParams protocol = {});
SessionRun run_network_initiated(const Device& set, const std::string& slp,
                                 LinkParams link = {}, std::uint64_t seed = 1,
                                 ProtocolParams protocol = {});
// The device follows `path` for the duration of the session.
SessionRun run_triggered(const Device& set, const std::string& slp,
                         const TriggerSpec& trigger, const Path& path,
                         LinkParams link = {}, std::uint64_t seed = 1,
                         ProtocolParams protocol = {});

}  // namespace geomsg::supl
