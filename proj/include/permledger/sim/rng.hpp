#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "permledger/sim/time.hpp"

namespace permledger::sim {

// SplitMix64 step. Used only to derive engine seeds; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are implementation defined, so every
// draw below is derived from raw 64-bit outputs with our own arithmetic. The
// result: identical seeds give identical draws on every conforming platform.
//
// Streams are split by (seed, stream_id): the engine is seeded with the first
// SplitMix64 output of `seed ^ mix(stream_id)`. A node or client owns its own
// stream, so its draws never depend on how events of other actors interleave.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  // Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  bool coin(double p_true);
  // Uniform in [lo, hi], integer nanoseconds.
  Duration uniform(Duration lo, Duration hi);
  // Exponential with the given mean, rounded to nanoseconds.
  Duration exponential(Duration mean);
  void fill(std::span<std::uint8_t> out);

 private:
  std::mt19937_64 engine_;
};

}  // namespace permledger::sim
