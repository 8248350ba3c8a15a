#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace permledger::sim {

// All simulated time is kept in integer nanoseconds so that event ordering and
// cost arithmetic are exact and platform independent.
using Duration = std::chrono::nanoseconds;

struct SimClock {
  using duration = Duration;
  using rep = duration::rep;
  using period = duration::period;
  using time_point = std::chrono::time_point<SimClock, duration>;
  static constexpr bool is_steady = true;
};

using SimTime = SimClock::time_point;

constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) * 1e-9; }
constexpr double to_seconds(SimTime t) { return to_seconds(t.time_since_epoch()); }
constexpr double to_millis(Duration d) { return static_cast<double>(d.count()) * 1e-6; }

inline Duration seconds(double s) { return Duration{std::llround(s * 1e9)}; }
inline Duration millis(double ms) { return Duration{std::llround(ms * 1e6)}; }
inline Duration micros(double us) { return Duration{std::llround(us * 1e3)}; }
inline Duration nanos(double ns) { return Duration{std::llround(ns)}; }

inline SimTime at_seconds(double s) { return SimTime{seconds(s)}; }

}  // namespace permledger::sim
