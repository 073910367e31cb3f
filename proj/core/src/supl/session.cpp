#include "geomsg/supl/session.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "geomsg/supl/message.hpp"

namespace geomsg::supl {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::START: return "START";
    case MessageKind::RESPONSE: return "RESPONSE";
    case MessageKind::POS_INIT: return "POS_INIT";
    case MessageKind::POS: return "POS";
    case MessageKind::END: return "END";
    case MessageKind::TRIGGERED_START: return "TRIGGERED_START";
    case MessageKind::TRIGGERED_RESPONSE: return "TRIGGERED_RESPONSE";
    case MessageKind::REPORT: return "REPORT";
    case MessageKind::INIT_PUSH: return "INIT_PUSH";
  }
  return "?";
}

int SuplMessage::ordinal() const {
  if (const auto* pos = std::get_if<PosPayload>(&payload)) return pos->round;
  if (const auto* report = std::get_if<ReportPayload>(&payload)) return report->sequence;
  return 0;
}

const char* to_string(SessionMode mode) {
  return mode == SessionMode::set_initiated ? "set_initiated" : "network_initiated";
}

const char* to_string(SessionState state) {
  switch (state) {
    case SessionState::IDLE: return "IDLE";
    case SessionState::START_SENT: return "START_SENT";
    case SessionState::RESPONSE_RECEIVED: return "RESPONSE_RECEIVED";
    case SessionState::POS_INIT_SENT: return "POS_INIT_SENT";
    case SessionState::POS_IN_PROGRESS: return "POS_IN_PROGRESS";
    case SessionState::TRIGGER_ACTIVE: return "TRIGGER_ACTIVE";
    case SessionState::ENDED: return "ENDED";
    case SessionState::FAILED: return "FAILED";
  }
  return "?";
}

bool is_terminal(SessionState state) {
  return state == SessionState::ENDED || state == SessionState::FAILED;
}

bool is_legal_transition(SessionState from, SessionState to, bool triggered) {
  using S = SessionState;
  if (is_terminal(from)) return false;
  if (to == S::FAILED) return true;
  switch (from) {
    case S::IDLE: return to == S::START_SENT;
    case S::START_SENT: return to == S::RESPONSE_RECEIVED;
    case S::RESPONSE_RECEIVED:
      return triggered ? to == S::TRIGGER_ACTIVE : to == S::POS_INIT_SENT;
    case S::POS_INIT_SENT: return !triggered && to == S::POS_IN_PROGRESS;
    case S::POS_IN_PROGRESS: return !triggered && to == S::ENDED;
    case S::TRIGGER_ACTIVE: return triggered && to == S::ENDED;
    default: return false;
  }
}

SuplSession::SuplSession(std::string session_id, std::string set_id,
                         SessionMode mode, std::optional<TriggerSpec> trigger)
    : session_id_(std::move(session_id)),
      set_id_(std::move(set_id)),
      mode_(mode),
      trigger_(std::move(trigger)) {}

void SuplSession::transition(SessionState to) {
  if (!is_legal_transition(state(), to, trigger_.has_value())) {
    throw std::logic_error(fmt::format("session {}: illegal transition {} -> {}",
                                       session_id_, to_string(state()),
                                       to_string(to)));
  }
  history_.push_back(to);
}

void SuplSession::fail(std::string detail) {
  const SessionState from = state();
  transition(SessionState::FAILED);
  failed_in_ = from;
  failure_ = std::move(detail);
}

}  // namespace geomsg::supl
