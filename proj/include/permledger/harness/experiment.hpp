#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "permledger/harness/client.hpp"
#include "permledger/harness/config.hpp"
#include "permledger/harness/metrics.hpp"

namespace permledger::harness {

struct Diagnostics {
  std::array<std::uint64_t, static_cast<std::size_t>(sim::Traffic::Count)> messages{};
  std::uint64_t final_height = 0;
  bool chains_consistent = true;
  std::uint64_t failovers = 0;
  std::uint64_t events_received = 0;
  std::uint64_t events_processed = 0;
  std::size_t max_queue_depth = 0;
  std::uint64_t rejected = 0;
  std::uint64_t leader_changes = 0;
  std::uint64_t round_changes = 0;
  std::uint64_t equivocations = 0;
  std::uint64_t trace_digest = 0;
  double sim_end_s = 0;

  std::uint64_t count(sim::Traffic t) const { return messages[static_cast<std::size_t>(t)]; }
};

struct RateResult {
  double rate_per_client = 0;
  std::vector<MetricsRecord> rounds;
  MetricsRecord aggregate;
  Diagnostics diagnostics;
};

// One sweep point: a fresh cluster driven through every round of the
// schedule at a single per-client send rate.
class Experiment {
 public:
  Experiment(ExperimentConfig cfg, double rate_per_client, std::string preset = "run");
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  RateResult run();

  node::Cluster& cluster() { return *cluster_; }
  ledger::ContractAddress contract() const { return contract_; }
  const std::vector<std::unique_ptr<BenchClient>>& clients() const { return clients_; }

 private:
  MetricsRecord run_round(std::uint32_t round);
  void emit(std::uint32_t client, std::uint64_t remaining, sim::Duration gap);
  Diagnostics collect() const;

  ExperimentConfig cfg_;
  double rate_;
  std::string preset_;
  std::unique_ptr<node::Cluster> cluster_;
  ledger::ContractAddress contract_ = 0;
  std::vector<std::unique_ptr<BenchClient>> clients_;
  std::vector<sim::Rng> client_rngs_;
  std::vector<std::uint64_t> next_seq_;
  std::uint64_t emitted_ = 0;
};

// Called after each sweep point finishes, on the worker that ran it.
using Inspector = std::function<void(const ExperimentConfig&, double rate, Experiment&)>;

// Runs every rate of the schedule, each in isolation, on up to `workers`
// threads (0 = hardware concurrency). Results are in rate order.
std::vector<RateResult> run_sweep(const ExperimentConfig& cfg, const std::string& preset, unsigned workers = 0,
                                  const Inspector& inspect = {});

}  // namespace permledger::harness
