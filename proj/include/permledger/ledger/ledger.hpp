#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "permledger/ledger/contract.hpp"
#include "permledger/ledger/cost_model.hpp"
#include "permledger/ledger/mempool.hpp"
#include "permledger/ledger/types.hpp"

namespace permledger::ledger {

enum class SubmitError : std::uint8_t { None, PayloadTooLarge, UnknownContract, Duplicate, AlreadyCommitted };

const char* submit_error_name(SubmitError e);

struct ReadResult {
  std::string value;  // empty when the key is absent
  bool found = false;
};

struct ApplyResult {
  bool ok = false;
  std::string error;
  BlockEvent event;
  // Simulated execution cost of the public part of the block.
  sim::Duration cost{};
  // Indices into block->txs of private transactions, in block order.
  std::vector<std::size_t> private_txs;
};

// Per-node chain, public contract state, committed-transaction index and
// mempool. Consensus engines drive it; it never talks to the network.
class Ledger {
 public:
  Ledger(NodeId self, CostModel costs);

  NodeId self() const { return self_; }
  const CostModel& costs() const { return costs_; }

  void add_contract(ContractState contract);
  // Registers a private contract address so submissions to it validate.
  void add_private_address(ContractAddress address) { private_addresses_.insert(address); }
  bool knows_contract(ContractAddress address) const;
  ContractState* contract(ContractAddress address);
  const ContractState* contract(ContractAddress address) const;
  const std::map<ContractAddress, ContractState>& contracts() const { return contracts_; }

  SubmitError validate_submission(const Transaction& tx) const;
  // Validates and enqueues; stamps submit_time with `now`.
  SubmitError submit(Transaction tx, sim::SimTime now);

  // Drains up to max_txs pending transactions in arrival order into a sealed
  // block on top of `parent`. Committed ids and those matching `skip` are
  // dropped. Returns nothing when no transaction remains.
  std::optional<Block> make_block(const Block& parent, std::size_t max_txs, sim::SimTime now, NodeId proposer,
                                  const std::function<bool(const TxId&)>& skip = {});

  // Appends `block` at height()+1 and executes its public transactions.
  // A rejected block leaves all state untouched.
  ApplyResult apply_block(const BlockPtr& block, sim::SimTime commit_time);

  // Execution cost of the public part of a block without applying it.
  sim::Duration block_cost(const Block& block) const;

  ReadResult read(ContractAddress address, const std::string& key) const;

  std::uint64_t height() const { return chain_.size() - 1; }
  const BlockPtr& tip() const { return chain_.back(); }
  const BlockPtr& block_at(std::uint64_t height) const { return chain_.at(height); }
  const std::vector<BlockPtr>& chain() const { return chain_; }
  bool is_committed(const TxId& id) const { return committed_.contains(id); }
  std::optional<std::uint64_t> committed_height(const TxId& id) const;
  std::size_t committed_tx_count() const { return committed_.size(); }

  Mempool& mempool() { return mempool_; }
  const Mempool& mempool() const { return mempool_; }

  // Verifies hash links and stored hashes of the whole chain.
  bool verify_chain() const;

 private:
  NodeId self_;
  CostModel costs_;
  std::vector<BlockPtr> chain_;
  std::map<ContractAddress, ContractState> contracts_;
  std::unordered_set<ContractAddress> private_addresses_;
  std::unordered_map<TxId, std::uint64_t, Hash256Hasher> committed_;
  Mempool mempool_;
};

}  // namespace permledger::ledger
