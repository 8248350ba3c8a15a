#pragma once

#include <deque>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "permledger/ledger/contract.hpp"
#include "permledger/ledger/cost_model.hpp"
#include "permledger/privacy/enclave.hpp"
#include "permledger/sim/network.hpp"

namespace permledger::privacy {

using ledger::ContractAddress;
using ledger::Transaction;
using ledger::TxId;

struct PrivacyGroup {
  Hash256 id{};
  std::vector<NodeId> members;  // sorted, unique

  // Throws std::invalid_argument for fewer than two distinct members.
  static PrivacyGroup make(std::vector<NodeId> members);
  bool contains(NodeId node) const;
};

Hash256 group_id(std::vector<NodeId> members);

enum class PrivateOutcome : std::uint8_t { Applied, Skipped, Deferred, Failed };

const char* private_outcome_name(PrivateOutcome o);

struct PrivateExecution {
  TxId tx{};
  PrivateOutcome outcome = PrivateOutcome::Skipped;
  // Enclave time: decryption plus contract execution. Zero when skipped or deferred.
  sim::Duration cost{};
};

struct PrivacyOverhead {
  sim::Duration sender{};
  sim::Duration member{};
};

// Sender: c_enc * bytes + (group_size - 1) * net_delay(ciphertext).
// Member: c_dec * bytes. A group_size below 2 means a public transaction.
PrivacyOverhead privacy_overhead(std::size_t payload_bytes, std::size_t group_size, const ledger::CostModel& costs,
                                 const sim::NetworkModel& link);

// Per-node transaction manager: stores encrypted payloads by hash, holds the
// private contract state of the groups this node belongs to, and executes
// committed private transactions in per-contract order.
class TransactionManager {
 public:
  using Directory = std::map<NodeId, PublicKey>;

  TransactionManager(NodeId self, const Enclave& enclave, const Directory& directory, ledger::CostModel costs);

  NodeId self() const { return self_; }

  void add_contract(PrivacyGroup group, ledger::ContractState state);
  const PrivacyGroup* group_of(ContractAddress address) const;
  ledger::ContractState* contract(ContractAddress address);
  const ledger::ContractState* contract(ContractAddress address) const;
  std::size_t contract_count() const { return contracts_.size(); }

  // Encrypts the call for every group member, keeps the local copy, and
  // returns the payload to ship to the other members.
  EncryptedPayload distribute(const ledger::Call& call, const PrivacyGroup& group, sim::Rng& rng);

  // Stores a payload from another manager and runs any deferred
  // transactions it unblocks.
  std::vector<PrivateExecution> receive(EncryptedPayload payload);

  // Handles a committed private transaction (public form). May also run
  // transactions queued behind it.
  std::vector<PrivateExecution> execute(const Transaction& tx);

  bool has_payload(const Hash256& hash) const { return store_.contains(hash); }
  const std::unordered_map<Hash256, EncryptedPayload, ledger::Hash256Hasher>& payloads() const { return store_; }
  const std::unordered_set<TxId, ledger::Hash256Hasher>& skip_markers() const { return skipped_; }
  const std::unordered_set<TxId, ledger::Hash256Hasher>& failed() const { return failed_; }
  std::size_t deferred_count() const;

 private:
  PrivateExecution run(const Transaction& tx, const EncryptedPayload& payload);
  void drain_deferred(ContractAddress address, std::vector<PrivateExecution>& out);

  NodeId self_;
  const Enclave& enclave_;
  const Directory& directory_;
  ledger::CostModel costs_;
  std::map<ContractAddress, std::pair<PrivacyGroup, ledger::ContractState>> contracts_;
  std::unordered_map<Hash256, EncryptedPayload, ledger::Hash256Hasher> store_;
  std::map<ContractAddress, std::deque<Transaction>> deferred_;
  std::unordered_set<TxId, ledger::Hash256Hasher> skipped_;
  std::unordered_set<TxId, ledger::Hash256Hasher> failed_;
};

}  // namespace permledger::privacy
