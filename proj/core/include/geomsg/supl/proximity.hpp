#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geomsg/geo/point.hpp"
#include "geomsg/sig/compose.hpp"
#include "geomsg/sig/signature.hpp"
#include "geomsg/sim_time.hpp"
#include "geomsg/supl/device.hpp"

namespace geomsg::supl {

// Bluetooth tag with a 1 m calibrated output power. The transmit model is
// inverse-square path loss plus optional uniform jitter of +-jitter_dbm.
class Beacon {
 public:
  // Distances below this are treated as this; the log model diverges at 0.
  static constexpr double kMinDistanceM = 0.1;

  Beacon(std::string id, geo::GeoPoint point, double calibrated_power,
         double jitter_dbm = 0.0, std::uint64_t seed = 1);

  const std::string& id() const { return id_; }
  const geo::GeoPoint& point() const { return point_; }
  double calibrated_power() const { return calibrated_power_; }

  // Received power at `distance_m` from the tag.
  double observed_dbm(double distance_m);

 private:
  std::string id_;
  geo::GeoPoint point_;
  double calibrated_power_;
  double jitter_dbm_;
  std::mt19937_64 rng_;
};

struct Notification {
  std::string set_id;
  std::string beacon_id;
  SimTime time;
  double estimated_m = 0.0;
  std::string message;
};

class NotificationSink {
 public:
  virtual ~NotificationSink() = default;
  virtual void dispatch(const Notification& notification) = 0;
};

// Operator-side SMS gateway stand-in: keeps what it was asked to send.
class CollectingSink final : public NotificationSink {
 public:
  void dispatch(const Notification& notification) override {
    sent_.push_back(notification);
  }
  const std::vector<Notification>& sent() const { return sent_; }

 private:
  std::vector<Notification> sent_;
};

// Turns beacon sightings into SMS notifications, at most one per
// (SET, beacon) per continuous stay within range. A stay ends once the
// estimate exceeds threshold + hysteresis_m.
class ProximityScanner {
 public:
  struct Options {
    double hysteresis_m = 0.0;
    std::string body_text = "You are near {beacon}";
    std::size_t sms_limit = sig::kSmsLimit;
  };

  explicit ProximityScanner(const sig::Signer& signer);
  ProximityScanner(const sig::Signer& signer, Options options);

  // Throws Errc::access unless the SET holds a grant that currently allows
  // D-SLP access at its position; no beacon is scanned in that case.
  std::vector<Notification> scan(const Device& set, SimTime now,
                                 std::span<Beacon> beacons, double threshold_m,
                                 NotificationSink& sink);

 private:
  const sig::Signer& signer_;
  Options options_;
  std::set<std::pair<std::string, std::string>> in_range_;
};

}  // namespace geomsg::supl
