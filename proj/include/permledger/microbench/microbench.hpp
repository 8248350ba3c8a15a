#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permledger/harness/metrics.hpp"
#include "permledger/ledger/cost_model.hpp"
#include "permledger/sim/network.hpp"

namespace permledger::microbench {

struct MicrobenchConfig {
  std::uint64_t seed = 42;
  ledger::CostModel costs;
  sim::NetworkModel network;
  double block_time_ms = 1.0;
  std::uint32_t repetitions = 5;
  // Larger write sets are refused instead of executed.
  std::uint64_t max_writes_per_tx = 2'000'000;
  std::uint64_t base_store_size = 1000;
  std::vector<std::uint64_t> rwset_sizes = {1, 10, 100, 1000, 10000, 100000, 1000000};
  std::vector<std::uint64_t> kv_store_sizes = {1000, 10000, 100000, 1000000};
  // Simulated operations per store size and kind, and timed map operations.
  std::uint64_t kv_sim_ops = 20;
  std::uint64_t kv_wall_ops = 200000;
  std::vector<std::size_t> payload_sizes = {1024, 10240, 20480, 30720};
  std::size_t fixed_payload = 1024;
};

struct MicrobenchResult {
  std::string suite;  // rwset, kvsize, payload
  std::string label;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t store_size = 0;
  std::size_t tx_payload = 0;
  std::size_t event_payload = 0;
  bool ok = true;
  std::string error;
  std::vector<double> latencies_s;
  double mean_latency_s = 0;
  // Mean real time of the state operations, per transaction (rwset) or per
  // operation (kvsize). Wall time is machine dependent and never enters
  // reports.
  std::optional<double> wall_ns;
};

// One contract invocation with `reads` lookups and `writes` updates, run
// `repetitions` times one at a time through a single-node RAFT chain.
MicrobenchResult bench_rwset(const MicrobenchConfig& cfg, std::uint64_t reads, std::uint64_t writes);

// Mean read and write latency against a store of `store_size` entries, with
// `ops` simulated operations of each kind. Returns {read, write}; both carry
// no samples when ops is zero.
std::pair<MicrobenchResult, MicrobenchResult> bench_kvsize(const MicrobenchConfig& cfg, std::uint64_t store_size,
                                                           std::uint64_t ops);

// Payloads above 32768 bytes are rejected at submission (ok = false).
MicrobenchResult bench_payload(const MicrobenchConfig& cfg, std::size_t tx_payload, std::size_t event_payload);

std::vector<MicrobenchResult> run_rwset_suite(const MicrobenchConfig& cfg);
std::vector<MicrobenchResult> run_kvsize_suite(const MicrobenchConfig& cfg);
std::vector<MicrobenchResult> run_payload_suite(const MicrobenchConfig& cfg);

harness::MetricsRecord to_record(const MicrobenchResult& r, const MicrobenchConfig& cfg, const std::string& preset);

}  // namespace permledger::microbench
