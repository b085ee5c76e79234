#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

namespace gridfed {

using Tick = std::int64_t;
using TimeslotIndex = std::int64_t;
using IntervalIndex = std::int64_t;

/// Number of ticks per simulated second; one tick is 10 microseconds.
inline constexpr Tick kTicksPerSecond = 100'000;

/// Discrete simulation clock value. All ordering and arithmetic is done on
/// integer ticks so event order never depends on floating-point rounding.
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(Tick ticks) : ticks_(ticks) {}

  static constexpr SimTime from_ticks(Tick ticks) { return SimTime(ticks); }

  /// Converts seconds to ticks, throwing ValidationError(key) when the value
  /// is not an exact multiple of the base unit.
  static SimTime from_seconds(double seconds, std::string_view key = "time");

  constexpr Tick ticks() const { return ticks_; }
  constexpr double seconds() const {
    return static_cast<double>(ticks_) / static_cast<double>(kTicksPerSecond);
  }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime rhs) {
    ticks_ += rhs.ticks_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime rhs) {
    ticks_ -= rhs.ticks_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ticks_ + b.ticks_); }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.ticks_ - b.ticks_); }
  friend constexpr SimTime operator*(SimTime a, std::int64_t k) { return SimTime(a.ticks_ * k); }
  friend constexpr SimTime operator*(std::int64_t k, SimTime a) { return SimTime(a.ticks_ * k); }

 private:
  Tick ticks_ = 0;
};

/// Index of the half-open slot [s*tau, (s+1)*tau) containing `t`.
constexpr TimeslotIndex slot_of(SimTime t, SimTime tau) {
  return t.ticks() / tau.ticks();
}

constexpr SimTime slot_start(TimeslotIndex s, SimTime tau) {
  return tau * s;
}
constexpr SimTime slot_end(TimeslotIndex s, SimTime tau) {
  return tau * (s + 1);
}

} // namespace gridfed
