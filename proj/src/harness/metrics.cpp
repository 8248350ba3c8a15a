#include "permledger/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace permledger::harness {

std::optional<double> compute_throughput(std::span<const sim::SimTime> confirmations) {
  if (confirmations.size() < 2) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(confirmations.begin(), confirmations.end());
  const double window = sim::to_seconds(*hi - *lo);
  if (window <= 0) return std::nullopt;
  return static_cast<double>(confirmations.size()) / window;
}

double tx_latency(sim::SimTime submit, sim::SimTime receipt) {
  if (receipt < submit) throw std::invalid_argument("confirmation precedes submission");
  return sim::to_seconds(receipt - submit);
}

double nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
  if (p <= 0 || p > 100) throw std::invalid_argument("percentile must be in (0, 100]");
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::optional<LatencyStats> latency_stats(std::vector<double> samples) {
  if (samples.empty()) return std::nullopt;
  std::sort(samples.begin(), samples.end());
  LatencyStats s;
  s.avg = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  s.min = samples.front();
  s.max = samples.back();
  s.p50 = nearest_rank(samples, 50);
  s.p95 = nearest_rank(samples, 95);
  s.p99 = nearest_rank(samples, 99);
  return s;
}

MetricsRecord aggregate_rounds(std::span<const MetricsRecord> rounds) {
  if (rounds.empty()) throw std::invalid_argument("no round records to aggregate");
  const auto& first = rounds.front();
  MetricsRecord out = first;
  out.submitted = out.confirmed = out.failed = 0;
  out.window_s.reset();
  double tput = 0;
  std::size_t tput_n = 0;
  LatencyStats lat;
  std::size_t lat_n = 0;
  for (const auto& r : rounds) {
    if (r.workload != first.workload || r.consensus != first.consensus || r.block_time_ms != first.block_time_ms ||
        r.offered_tps != first.offered_tps || r.preset != first.preset) {
      throw std::invalid_argument("cannot aggregate rounds of different configurations");
    }
    out.submitted += r.submitted;
    out.confirmed += r.confirmed;
    out.failed += r.failed;
    if (r.throughput_tps) {
      tput += *r.throughput_tps;
      ++tput_n;
    }
    if (r.latency) {
      lat.avg += r.latency->avg;
      lat.min += r.latency->min;
      lat.max += r.latency->max;
      lat.p50 += r.latency->p50;
      lat.p95 += r.latency->p95;
      lat.p99 += r.latency->p99;
      ++lat_n;
    }
  }
  out.throughput_tps = tput_n ? std::optional<double>(tput / static_cast<double>(tput_n)) : std::nullopt;
  if (lat_n) {
    const auto k = static_cast<double>(lat_n);
    out.latency = LatencyStats{lat.avg / k, lat.min / k, lat.max / k, lat.p50 / k, lat.p95 / k, lat.p99 / k};
  } else {
    out.latency.reset();
  }
  return out;
}

}  // namespace permledger::harness
