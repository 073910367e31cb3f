#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geomsg/cell/fix_cache.hpp"
#include "geomsg/supl/geofence.hpp"

namespace geomsg::supl {

enum class SessionMode { set_initiated, network_initiated };
const char* to_string(SessionMode mode);

enum class SessionState {
  IDLE,
  START_SENT,
  RESPONSE_RECEIVED,
  POS_INIT_SENT,
  POS_IN_PROGRESS,
  TRIGGER_ACTIVE,
  ENDED,
  FAILED,
};
const char* to_string(SessionState state);

bool is_terminal(SessionState state);

// Transition table of the SET-side session. TRIGGER_ACTIVE is only
// reachable for triggered sessions; ENDED and FAILED are absorbing.
bool is_legal_transition(SessionState from, SessionState to, bool triggered);

class SuplSession {
 public:
  SuplSession(std::string session_id, std::string set_id, SessionMode mode,
              std::optional<TriggerSpec> trigger = std::nullopt);

  const std::string& session_id() const { return session_id_; }
  const std::string& set_id() const { return set_id_; }
  SessionMode mode() const { return mode_; }
  SessionState state() const { return history_.back(); }
  const std::optional<TriggerSpec>& trigger() const { return trigger_; }
  const std::optional<cell::Fix>& result() const { return result_; }
  const std::vector<SessionState>& history() const { return history_; }

  // State the session was in when it failed, and why.
  std::optional<SessionState> failed_in() const { return failed_in_; }
  const std::string& failure() const { return failure_; }

  // Throws std::logic_error on a transition outside the table.
  void transition(SessionState to);
  void fail(std::string detail);
  void set_result(const cell::Fix& fix) { result_ = fix; }

 private:
  std::string session_id_;
  std::string set_id_;
  SessionMode mode_;
  std::optional<TriggerSpec> trigger_;
  std::vector<SessionState> history_{SessionState::IDLE};
  std::optional<cell::Fix> result_;
  std::optional<SessionState> failed_in_;
  std::string failure_;
};

}  // namespace geomsg::supl
