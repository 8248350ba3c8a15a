#pragma once

#include <map>
#include <memory>
#include <unordered_set>

#include "permledger/consensus/engine.hpp"
#include "permledger/ledger/ledger.hpp"
#include "permledger/privacy/enclave.hpp"
#include "permledger/privacy/transaction_manager.hpp"

namespace permledger::node {

using ledger::ClientId;
using ledger::NodeId;

class Cluster;

// Receives what a node sends back to a client. Implemented by harness clients.
class ClientSink {
 public:
  virtual ~ClientSink() = default;
  virtual void on_ack(const ledger::TxId& tx, ledger::SubmitError error) = 0;
  // Block events and receipts for already-committed resubmissions. For a
  // receipt, `block` is null.
  virtual void on_block_event(const std::shared_ptr<const ledger::BlockEvent>& event) = 0;
  virtual void on_read_response(std::uint64_t request_id, const ledger::ReadResult& result) = 0;
};

struct NodeStats {
  std::uint64_t blocks_committed = 0;
  std::uint64_t blocks_rejected = 0;
  sim::Duration exec_busy{};
  sim::Duration enclave_busy{};
};

// One peer: ledger, consensus engine, transaction manager and enclave, with
// two serial resources (block executor and enclave) on which simulated CPU
// time is charged.
class Node final : public consensus::NodeContext {
 public:
  Node(Cluster& cluster, NodeId id, std::uint64_t seed, const ledger::CostModel& costs,
       const privacy::TransactionManager::Directory& directory);

  void set_engine(std::unique_ptr<consensus::Engine> engine) { engine_ = std::move(engine); }

  // NodeContext
  NodeId self() const override { return id_; }
  std::uint32_t cluster_size() const override;
  sim::SimTime now() const override;
  ledger::Ledger& ledger() override { return ledger_; }
  sim::Rng& rng() override { return rng_; }
  void send(NodeId to, consensus::Message m) override;
  void broadcast(const consensus::Message& m) override;
  void set_timer(sim::Duration delay, std::uint64_t token) override;
  void defer(sim::SimTime when, std::function<void()> fn) override;
  sim::SimTime execute(const consensus::BlockPtr& block) override;
  bool commit(const consensus::BlockPtr& block) override;

  // Entry points called by the cluster on message delivery.
  void on_client_submit(ClientId client, ledger::Transaction tx);
  void on_read(ClientId client, std::uint64_t request_id, ledger::ContractAddress contract, const std::string& key);
  void on_peer_message(NodeId from, const consensus::Message& m);
  void on_private_payload(privacy::EncryptedPayload payload);

  void crash();
  bool crashed() const { return crashed_; }

  const ledger::Ledger& ledger() const { return ledger_; }
  consensus::Engine& engine() { return *engine_; }
  const consensus::Engine& engine() const { return *engine_; }
  privacy::Enclave& enclave() { return enclave_; }
  privacy::TransactionManager& tm() { return tm_; }
  const privacy::TransactionManager& tm() const { return tm_; }
  const NodeStats& stats() const { return stats_; }

 private:
  sim::SimTime charge_exec(sim::Duration cost);
  sim::SimTime charge_enclave(sim::Duration cost);
  void submit_private(const ledger::Transaction& tx, const privacy::PrivacyGroup& group);
  void account_private(const std::vector<privacy::PrivateExecution>& results);

  Cluster& cluster_;
  NodeId id_;
  ledger::Ledger ledger_;
  privacy::Enclave enclave_;
  privacy::TransactionManager tm_;
  std::unique_ptr<consensus::Engine> engine_;
  sim::Rng rng_;
  sim::Rng payload_rng_;
  bool crashed_ = false;

  sim::SimTime exec_free_{};
  sim::SimTime enclave_free_{};
  // Blocks executed ahead of commit: hash -> (height, finish time).
  std::map<ledger::Hash256, std::pair<std::uint64_t, sim::SimTime>> executed_;
  std::unordered_set<ledger::TxId, ledger::Hash256Hasher> private_seen_;
  NodeStats stats_;
};

}  // namespace permledger::node
