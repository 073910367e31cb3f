#pragma once

#include "geomsg/geo/point.hpp"

namespace geomsg::geo {

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance on a sphere of mean Earth radius.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  return haversine_km(a, b) * 1000.0;
}

// Received power pair for a beacon: the transmitter's output measured at 1 m
// and what the receiver sees now, both in dBm.
class RssiSample {
 public:
  static constexpr double kMinDbm = -120.0;
  static constexpr double kMaxDbm = 0.0;

  RssiSample(double calibrated_power, double observed_power);

  double calibrated_power() const { return calibrated_; }
  double observed_power() const { return observed_; }

  static bool valid(double dbm);

 private:
  double calibrated_;
  double observed_;
};

// Inverse-square distance estimate in metres. The power ratio in dB is
// converted to a linear ratio and its square root is the distance relative
// to the 1 m calibration point.
double rssi_distance_m(const RssiSample& sample);

// Observed dBm for a transmitter at `distance_m`; exact inverse of
// rssi_distance_m.
double path_loss_dbm(double calibrated_power, double distance_m);

}  // namespace geomsg::geo
