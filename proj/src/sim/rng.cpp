#include "permledger/sim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace permledger::sim {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  engine_.seed(splitmix64(state));
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t mixer = stream_id;
  return Rng(seed ^ splitmix64(mixer));
}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Rejection on the top of the range keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

bool Rng::coin(double p_true) { return uniform() < p_true; }

Duration Rng::uniform(Duration lo, Duration hi) {
  if (hi < lo) throw std::invalid_argument("Rng::uniform: hi < lo");
  const auto span = static_cast<std::uint64_t>((hi - lo).count());
  if (span == 0) return lo;
  return lo + Duration{static_cast<Duration::rep>(below(span + 1))};
}

Duration Rng::exponential(Duration mean) {
  // 1 - u is in (0, 1], so the log is finite.
  const double u = 1.0 - uniform();
  return Duration{std::llround(-std::log(u) * static_cast<double>(mean.count()))};
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
}

}  // namespace permledger::sim
