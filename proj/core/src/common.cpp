#include "geomsg/error.hpp"
#include "geomsg/sim_time.hpp"

#include <fmt/format.h>

namespace geomsg {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::validation: return "validation error";
    case Errc::parse: return "parse error";
    case Errc::precision: return "precision error";
    case Errc::not_found: return "not found";
    case Errc::config: return "configuration error";
    case Errc::length: return "length error";
    case Errc::storage: return "storage error";
    case Errc::authorization: return "authorization error";
    case Errc::access: return "access error";
    case Errc::discovery: return "discovery failure";
    case Errc::positioning: return "positioning error";
    case Errc::flow_closed: return "flow closed";
  }
  return "error";
}

std::string SimTime::str() const {
  const std::int64_t sign = us_ < 0 ? -1 : 1;
  const std::int64_t abs_us = us_ * sign;
  return fmt::format("{}{}.{:03}", sign < 0 ? "-" : "", abs_us / 1000000,
                     (abs_us % 1000000) / 1000);
}

}  // namespace geomsg
