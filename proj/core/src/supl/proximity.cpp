#include "geomsg/supl/proximity.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/geo/distance.hpp"
#include "geomsg/sig/map_url.hpp"
#include "geomsg/supl/dslp.hpp"

namespace geomsg::supl {

Beacon::Beacon(std::string id, geo::GeoPoint point, double calibrated_power,
               double jitter_dbm, std::uint64_t seed)
    : id_(std::move(id)),
      point_(point),
      calibrated_power_(calibrated_power),
      jitter_dbm_(jitter_dbm),
      rng_(seed) {
  if (!geo::RssiSample::valid(calibrated_power)) {
    throw Error(Errc::validation,
                fmt::format("beacon {} calibrated power {} dBm out of range", id_,
                            calibrated_power));
  }
  if (!(jitter_dbm >= 0.0)) {
    throw Error(Errc::validation, "beacon jitter must be >= 0");
  }
}

double Beacon::observed_dbm(double distance_m) {
  const double d = std::max(distance_m, kMinDistanceM);
  double dbm = geo::path_loss_dbm(calibrated_power_, d);
  if (jitter_dbm_ > 0.0) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    dbm += (2.0 * u - 1.0) * jitter_dbm_;
  }
  return dbm;
}

ProximityScanner::ProximityScanner(const sig::Signer& signer)
    : ProximityScanner(signer, Options{}) {}

ProximityScanner::ProximityScanner(const sig::Signer& signer, Options options)
    : signer_(signer), options_(std::move(options)) {}

std::vector<Notification> ProximityScanner::scan(const Device& set, SimTime now,
                                                 std::span<Beacon> beacons,
                                                 double threshold_m,
                                                 NotificationSink& sink) {
  const geo::GeoPoint here = set.path.position_at(now);
  if (!set.grant) {
    throw Error(Errc::access, fmt::format("{} holds no D-SLP grant", set.id));
  }
  if (!dslp_access_allowed(*set.grant, here, set.network, now)) {
    throw Error(Errc::access,
                fmt::format("{} grant for {} does not cover {} on '{}' at t={}",
                            set.id, set.grant->dslp_id, geo::format_coords(here),
                            set.network, now.str()));
  }

  std::vector<Notification> sent;
  for (Beacon& beacon : beacons) {
    const auto pair = std::make_pair(set.id, beacon.id());
    const double observed = beacon.observed_dbm(geo::haversine_m(here, beacon.point()));
    if (!geo::RssiSample::valid(observed)) {
      // Below receiver sensitivity: out of range.
      in_range_.erase(pair);
      continue;
    }
    const double estimate =
        geo::rssi_distance_m(geo::RssiSample(beacon.calibrated_power(), observed));
    if (estimate > threshold_m + options_.hysteresis_m) {
      in_range_.erase(pair);
      continue;
    }
    if (estimate > threshold_m || !in_range_.insert(pair).second) continue;

    const auto signature = signer_.sign(beacon.point(), geo::PrecisionLevel::exact);
    const std::string body =
        sig::replace_all(options_.body_text, "{beacon}", beacon.id());
    Notification n{set.id, beacon.id(), now, estimate,
                   sig::compose_message(sig::Channel::sms, body, signature,
                                        options_.sms_limit)};
    sink.dispatch(n);
    sent.push_back(std::move(n));
  }
  return sent;
}

}  // namespace geomsg::supl
