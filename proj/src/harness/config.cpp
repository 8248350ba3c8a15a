#include "permledger/harness/config.hpp"

namespace permledger::harness {

const char* workload_name(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::Write: return "write";
    case WorkloadKind::Null: return "null";
    case WorkloadKind::Read: return "read";
    case WorkloadKind::Mix50: return "mix50";
    case WorkloadKind::ReadWriteSet: return "rwset";
  }
  return "unknown";
}

const char* peer_policy_name(PeerPolicy p) { return p == PeerPolicy::OnePerClient ? "one-per-client" : "single-peer"; }

const char* arrival_name(Arrival a) { return a == Arrival::Uniform ? "uniform" : "poisson"; }

double ExperimentConfig::block_time_ms() const {
  const auto bt = cluster.algorithm == node::Algorithm::Raft ? cluster.raft.block_time : cluster.ibft.block_time;
  return sim::to_millis(bt);
}

std::string ExperimentConfig::workload_label() const {
  std::string s = workload_name(workload.kind);
  if (privacy) s += "-private";
  return s;
}

node::ClusterConfig default_cluster(node::Algorithm algorithm, double block_time_ms) {
  node::ClusterConfig c;
  c.algorithm = algorithm;
  c.raft.block_time = sim::millis(block_time_ms);
  c.ibft.block_time = sim::millis(block_time_ms);
  return c;
}

}  // namespace permledger::harness
