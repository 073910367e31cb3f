#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>

#include "geomsg/geo/point.hpp"
#include "geomsg/sim_time.hpp"
#include "geomsg/supl/geofence.hpp"

namespace geomsg::supl {

struct Device;

// A discovered local location server serving one venue.
struct DslpServer {
  std::string id;
  Geofence service_area;
  std::string access_network;
};

struct DslpGrant {
  std::string dslp_id;
  Geofence service_area;
  std::string access_network;
  SimTime window_start;
  SimTime window_end;
};

// Home location server: decides which SETs may use which D-SLPs.
class HomeSlp {
 public:
  explicit HomeSlp(std::string id = "hslp",
                   SimTime grant_duration = SimTime::from_seconds(3600));

  void deny(const std::string& set_id, const std::string& dslp_id);
  void deny_all(bool deny) { deny_all_ = deny; }
  bool permits(const std::string& set_id, const std::string& dslp_id) const;

  const std::string& id() const { return id_; }
  SimTime grant_duration() const { return grant_duration_; }

 private:
  std::string id_;
  SimTime grant_duration_;
  bool deny_all_ = false;
  std::set<std::pair<std::string, std::string>> denied_;
};

// Discovery, authorization request, grant issuance and storage on the SET.
// Throws Errc::discovery when the SET is in no advertised service area and
// Errc::authorization when the home server refuses.
DslpGrant authorize_dslp(Device& set, std::span<const DslpServer> dslps,
                         const HomeSlp& hslp, SimTime now);
DslpGrant authorize_dslp(Device& set, const DslpServer& dslp, const HomeSlp& hslp,
                         SimTime now);

// All of: inside the area, on the granted network, within the window.
bool dslp_access_allowed(const DslpGrant& grant, const geo::GeoPoint& p,
                         const std::string& network, SimTime t);

}  // namespace geomsg::supl
