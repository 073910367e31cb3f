#pragma once

#include <optional>
#include <string>
#include <variant>

#include "geomsg/cell/fix_cache.hpp"
#include "geomsg/geo/point.hpp"
#include "geomsg/supl/geofence.hpp"

namespace geomsg::supl {

enum class MessageKind {
  START,
  RESPONSE,
  POS_INIT,
  POS,
  END,
  TRIGGERED_START,
  TRIGGERED_RESPONSE,
  REPORT,
  INIT_PUSH,
};

const char* to_string(MessageKind kind);

struct StartPayload {
  std::string capabilities;
};
struct TriggeredStartPayload {
  std::string capabilities;
  TriggerSpec trigger;
};
// Position measurement reported by the SET.
struct PosInitPayload {
  geo::GeoPoint measurement;
};
// One measurement-exchange round. Rounds sent by the SET carry a
// measurement; the final round, when sent by the SLP, carries the fix.
struct PosPayload {
  int round = 0;
  std::optional<geo::GeoPoint> measurement;
  std::optional<cell::Fix> fix;
};
struct ReportPayload {
  int sequence = 0;
  cell::Fix fix;
};
struct PushPayload {
  std::string slp_address;
};
struct EndPayload {
  std::optional<cell::Fix> fix;
};

using Payload = std::variant<std::monostate, StartPayload, TriggeredStartPayload,
                             PosInitPayload, PosPayload, ReportPayload,
                             PushPayload, EndPayload>;

struct SuplMessage {
  std::string session_id;
  MessageKind kind = MessageKind::START;
  Payload payload;

  // Position within the session's exchange: POS round or REPORT sequence,
  // zero for the other kinds. Together with `kind` it identifies
  // retransmitted duplicates.
  int ordinal() const;
};

}  // namespace geomsg::supl
