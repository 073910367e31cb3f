#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace geomsg {

// Simulation time with microsecond resolution. Integer ticks keep event
// ordering and trace output identical across runs and platforms.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
  static SimTime from_seconds(double s) {
    return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
  }
  static constexpr SimTime max() {
    return SimTime(std::numeric_limits<std::int64_t>::max());
  }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr SimTime operator+(SimTime d) const { return SimTime(us_ + d.us_); }
  constexpr SimTime operator-(SimTime d) const { return SimTime(us_ - d.us_); }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime(us_ * k); }
  constexpr SimTime& operator+=(SimTime d) {
    us_ += d.us_;
    return *this;
  }
  constexpr auto operator<=>(const SimTime&) const = default;

  // Seconds with three fractional digits, e.g. "10.100".
  std::string str() const;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}

  std::int64_t us_ = 0;
};

}  // namespace geomsg
