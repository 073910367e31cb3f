#include "geomsg/supl/dslp.hpp"

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/supl/device.hpp"

namespace geomsg::supl {

HomeSlp::HomeSlp(std::string id, SimTime grant_duration)
    : id_(std::move(id)), grant_duration_(grant_duration) {
  if (grant_duration_ <= SimTime()) {
    throw Error(Errc::validation, "grant duration must be > 0");
  }
}

void HomeSlp::deny(const std::string& set_id, const std::string& dslp_id) {
  denied_.emplace(set_id, dslp_id);
}

bool HomeSlp::permits(const std::string& set_id, const std::string& dslp_id) const {
  return !deny_all_ && !denied_.contains({set_id, dslp_id});
}

DslpGrant authorize_dslp(Device& set, std::span<const DslpServer> dslps,
                         const HomeSlp& hslp, SimTime now) {
  // 1. discovery
  const geo::GeoPoint here = set.path.position_at(now);
  const DslpServer* found = nullptr;
  for (const auto& dslp : dslps) {
    if (dslp.service_area.contains(here)) {
      found = &dslp;
      break;
    }
  }
  if (!found) {
    throw Error(Errc::discovery,
                fmt::format("{} at {} is outside every D-SLP service area", set.id,
                            geo::format_coords(here)));
  }
  // 2. authorization request to the home server
  if (!hslp.permits(set.id, found->id)) {
    throw Error(Errc::authorization,
                fmt::format("{} denies {} access to {}", hslp.id(), set.id, found->id));
  }
  // 3. grant issuance
  DslpGrant grant{found->id, found->service_area, found->access_network, now,
                  now + hslp.grant_duration()};
  // 4. the SET keeps the grant
  set.grant = grant;
  return grant;
}

DslpGrant authorize_dslp(Device& set, const DslpServer& dslp, const HomeSlp& hslp,
                         SimTime now) {
  return authorize_dslp(set, std::span<const DslpServer>(&dslp, 1), hslp, now);
}

bool dslp_access_allowed(const DslpGrant& grant, const geo::GeoPoint& p,
                         const std::string& network, SimTime t) {
  const bool in_area = grant.service_area.contains(p);
  const bool on_network = network == grant.access_network;
  const bool in_window = t >= grant.window_start && t <= grant.window_end;
  return in_area && on_network && in_window;
}

}  // namespace geomsg::supl
