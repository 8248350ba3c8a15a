#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "permledger/consensus/ibft.hpp"
#include "permledger/consensus/raft.hpp"
#include "permledger/node/node.hpp"
#include "permledger/sim/kernel.hpp"
#include "permledger/sim/network.hpp"

namespace permledger::node {

enum class Algorithm : std::uint8_t { Raft, Ibft };

const char* algorithm_name(Algorithm a);

struct ClusterConfig {
  Algorithm algorithm = Algorithm::Raft;
  consensus::RaftConfig raft;
  consensus::IbftConfig ibft;
  // Per-node IBFT behaviour; absent nodes are honest.
  std::map<NodeId, consensus::IbftBehavior> byzantine;
  sim::NetworkModel network;
  ledger::CostModel costs;
  std::uint64_t seed = 1;

  std::uint32_t node_count() const;
};

// A set of nodes sharing one scheduler and network. Also the transport for
// client traffic: clients address nodes through submit/read/subscribe.
class Cluster {
 public:
  explicit Cluster(ClusterConfig cfg);
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  // Starts the consensus engines at the current time.
  void start();

  const ClusterConfig& config() const { return cfg_; }
  sim::Scheduler& scheduler() { return sched_; }
  const sim::Scheduler& scheduler() const { return sched_; }
  sim::Network& network() { return network_; }
  const sim::Network& network() const { return network_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(nodes_.size()); }
  Node& node(NodeId id) { return *nodes_.at(id); }
  const Node& node(NodeId id) const { return *nodes_.at(id); }

  // Deploys the benchmark contract with `initial_entries` pre-loaded pairs on
  // every node (public) or on the group members (private). Throws
  // std::invalid_argument for a private group of fewer than two nodes or
  // unknown members.
  ledger::ContractAddress deploy_contract(std::uint64_t initial_entries, ledger::Visibility visibility,
                                          std::optional<std::vector<NodeId>> group, std::uint64_t seed,
                                          std::size_t event_payload_size = 0);

  void register_client(ClientId client, ClientSink* sink);
  // A client listens to block events of one node at a time.
  void subscribe(ClientId client, NodeId node);
  void submit(ClientId client, NodeId node, ledger::Transaction tx);
  void read(ClientId client, NodeId node, std::uint64_t request_id, ledger::ContractAddress contract,
            std::string key);

  void crash(NodeId node);
  std::optional<NodeId> leader() const;

  // True when no height holds two different blocks across live or crashed nodes.
  bool chains_consistent() const;
  nlohmann::json dump_chain(NodeId node) const;

  // Node-facing transport.
  void send_message(NodeId from, NodeId to, consensus::Message m);
  void send_payload(NodeId from, NodeId to, const privacy::EncryptedPayload& payload);
  void send_ack(NodeId from, ClientId to, const ledger::TxId& tx, ledger::SubmitError error);
  void send_read_response(NodeId from, ClientId to, sim::SimTime depart, std::uint64_t request_id,
                          ledger::ReadResult result);
  void emit_event(NodeId from, std::shared_ptr<const ledger::BlockEvent> event, sim::SimTime ready);
  void send_receipt(NodeId from, ClientId to, std::shared_ptr<const ledger::BlockEvent> receipt);

 private:
  ClientSink* sink(ClientId client) const;

  ClusterConfig cfg_;
  sim::Scheduler sched_;
  sim::Network network_;
  privacy::TransactionManager::Directory directory_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::map<ClientId, ClientSink*> clients_;
  std::map<NodeId, std::vector<ClientId>> subscribers_;
  std::map<ClientId, NodeId> subscription_;
  ledger::ContractAddress next_address_ = 1;
};

}  // namespace permledger::node
