#include "geomsg/geo/distance.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::geo {
namespace {

constexpr double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = to_radians(a.lat());
  const double phi2 = to_radians(b.lat());
  const double dphi = phi2 - phi1;
  const double dlambda = to_radians(b.lon() - a.lon());
  const double s_phi = std::sin(dphi / 2.0);
  const double s_lambda = std::sin(dlambda / 2.0);
  double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

bool RssiSample::valid(double dbm) {
  return std::isfinite(dbm) && dbm >= kMinDbm && dbm <= kMaxDbm;
}

RssiSample::RssiSample(double calibrated_power, double observed_power)
    : calibrated_(calibrated_power), observed_(observed_power) {
  if (!valid(calibrated_power) || !valid(observed_power)) {
    throw Error(Errc::validation,
                fmt::format("RSSI outside [{}, {}] dBm: calibrated {} observed {}",
                            kMinDbm, kMaxDbm, calibrated_power, observed_power));
  }
}

double rssi_distance_m(const RssiSample& sample) {
  const double ratio_db = sample.calibrated_power() - sample.observed_power();
  const double linear_ratio = std::pow(10.0, ratio_db / 10.0);
  return std::sqrt(linear_ratio);
}

double path_loss_dbm(double calibrated_power, double distance_m) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw Error(Errc::validation,
                fmt::format("path loss distance must be positive, got {}", distance_m));
  }
  return calibrated_power - 20.0 * std::log10(distance_m);
}

}  // namespace geomsg::geo
