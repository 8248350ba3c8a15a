#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permledger/sim/time.hpp"

namespace permledger::harness {

struct LatencyStats {
  double avg = 0, min = 0, max = 0, p50 = 0, p95 = 0, p99 = 0;

  bool operator==(const LatencyStats&) const = default;
};

struct MetricsRecord {
  std::string preset;
  std::string workload;
  std::string consensus;
  double block_time_ms = 0;
  std::optional<double> offered_tps;
  std::uint64_t submitted = 0;
  std::uint64_t confirmed = 0;
  std::uint64_t failed = 0;
  std::optional<double> throughput_tps;
  std::optional<LatencyStats> latency;
  std::uint64_t seed = 0;
  // Confirmation window (last - first), per round only.
  std::optional<double> window_s;

  bool operator==(const MetricsRecord&) const = default;
};

// confirmed / (last - first). Absent with fewer than two confirmations or a
// zero-length window.
std::optional<double> compute_throughput(std::span<const sim::SimTime> confirmations);

// Seconds from client send to client receipt. Throws std::invalid_argument
// when the receipt precedes the send.
double tx_latency(sim::SimTime submit, sim::SimTime receipt);

// Nearest-rank percentile of a sorted sample, p in (0, 100].
double nearest_rank(std::span<const double> sorted, double p);

std::optional<LatencyStats> latency_stats(std::vector<double> samples);

// Mean of throughput and latency statistics, sum of counts. Throws
// std::invalid_argument for an empty set or records of different configs.
MetricsRecord aggregate_rounds(std::span<const MetricsRecord> rounds);

}  // namespace permledger::harness
