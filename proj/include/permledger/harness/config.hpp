#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permledger/node/cluster.hpp"

namespace permledger::harness {

using ledger::NodeId;

enum class WorkloadKind : std::uint8_t { Write, Null, Read, Mix50, ReadWriteSet };
enum class PeerPolicy : std::uint8_t { OnePerClient, SinglePeer };
enum class Arrival : std::uint8_t { Uniform, Poisson };

const char* workload_name(WorkloadKind k);
const char* peer_policy_name(PeerPolicy p);
const char* arrival_name(Arrival a);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Write;
  std::uint64_t key_space = 1000;
  std::uint64_t initial_entries = 1000;
  std::size_t payload_size = 0;
  std::size_t event_payload_size = 0;
  PeerPolicy peer_policy = PeerPolicy::OnePerClient;
  NodeId single_peer = 0;
  // ReadWriteSet only.
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
};

struct LoadSchedule {
  std::uint32_t clients = 3;
  // Per-client send rates in tx/s; each rate is a separate sweep point.
  std::vector<double> rates = {50, 150, 250, 350, 450, 550};
  double round_pause_s = 5.0;
  std::uint32_t rounds = 3;
  std::uint64_t tx_cap = 49500;
  double drain_timeout_s = 60.0;
  Arrival arrival = Arrival::Uniform;
  double warmup_s = 1.0;
  double ack_timeout_s = 2.0;
};

struct PrivacySpec {
  std::vector<NodeId> group;
};

struct FaultSpec {
  // Crash whichever node leads, this long after the first round starts.
  std::optional<double> crash_leader_at_s;
  // Crash specific nodes at the first round start.
  std::vector<NodeId> crash_nodes;
};

struct ExperimentConfig {
  std::string name = "run";
  std::uint64_t seed = 42;
  node::ClusterConfig cluster;
  WorkloadSpec workload;
  LoadSchedule schedule;
  std::optional<PrivacySpec> privacy;
  FaultSpec faults;

  // The configured block time of the selected algorithm, in milliseconds.
  double block_time_ms() const;
  std::string workload_label() const;
};

// Cluster defaults matching the benchmark setups: RAFT with three nodes or
// IBFT with four, both on the default LAN.
node::ClusterConfig default_cluster(node::Algorithm algorithm, double block_time_ms);

}  // namespace permledger::harness
