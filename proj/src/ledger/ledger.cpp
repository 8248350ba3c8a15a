#include "permledger/ledger/ledger.hpp"

#include <unordered_set>

namespace permledger::ledger {

const char* submit_error_name(SubmitError e) {
  switch (e) {
    case SubmitError::None: return "ok";
    case SubmitError::PayloadTooLarge: return "payload exceeds 32768 bytes";
    case SubmitError::UnknownContract: return "unknown contract";
    case SubmitError::Duplicate: return "duplicate transaction id";
    case SubmitError::AlreadyCommitted: return "transaction already committed";
  }
  return "unknown";
}

Ledger::Ledger(NodeId self, CostModel costs) : self_(self), costs_(costs) { chain_.push_back(genesis_block()); }

void Ledger::add_contract(ContractState contract) {
  const auto addr = contract.address();
  contracts_.insert_or_assign(addr, std::move(contract));
}

bool Ledger::knows_contract(ContractAddress address) const {
  return contracts_.contains(address) || private_addresses_.contains(address);
}

ContractState* Ledger::contract(ContractAddress address) {
  auto it = contracts_.find(address);
  return it == contracts_.end() ? nullptr : &it->second;
}

const ContractState* Ledger::contract(ContractAddress address) const {
  auto it = contracts_.find(address);
  return it == contracts_.end() ? nullptr : &it->second;
}

SubmitError Ledger::validate_submission(const Transaction& tx) const {
  if (tx.call.payload.size() > kMaxPayloadBytes) return SubmitError::PayloadTooLarge;
  if (!knows_contract(tx.contract)) return SubmitError::UnknownContract;
  if (committed_.contains(tx.id)) return SubmitError::AlreadyCommitted;
  if (mempool_.contains(tx.id)) return SubmitError::Duplicate;
  return SubmitError::None;
}

SubmitError Ledger::submit(Transaction tx, sim::SimTime now) {
  const auto err = validate_submission(tx);
  if (err != SubmitError::None) return err;
  tx.submit_time = now;
  mempool_.push(std::move(tx), now);
  return SubmitError::None;
}

std::optional<Block> Ledger::make_block(const Block& parent, std::size_t max_txs, sim::SimTime now,
                                        NodeId proposer, const std::function<bool(const TxId&)>& skip) {
  auto txs = mempool_.drain(max_txs, [&](const TxId& id) { return committed_.contains(id) || (skip && skip(id)); });
  if (txs.empty()) return std::nullopt;
  Block b;
  b.height = parent.height + 1;
  b.parent_hash = parent.hash;
  b.proposer = proposer;
  b.timestamp = now;
  b.txs = std::move(txs);
  b.seal();
  return b;
}

sim::Duration Ledger::block_cost(const Block& block) const {
  sim::Duration total{};
  for (const auto& tx : block.txs) {
    if (tx.is_private()) {
      total += costs_.base;
      continue;
    }
    const auto* c = contract(tx.contract);
    total += costs_.call_cost(tx.call, c ? c->size() : 0, c ? c->event_payload_size() : 0);
  }
  return total;
}

ApplyResult Ledger::apply_block(const BlockPtr& block, sim::SimTime commit_time) {
  ApplyResult r;
  if (!block) {
    r.error = "null block";
    return r;
  }
  if (block->height != height() + 1) {
    r.error = "height " + std::to_string(block->height) + " does not extend chain at " + std::to_string(height());
    return r;
  }
  if (block->parent_hash != tip()->hash) {
    r.error = "parent hash mismatch";
    return r;
  }
  if (!block->verify_hash()) {
    r.error = "block hash mismatch";
    return r;
  }
  std::unordered_set<TxId, Hash256Hasher> seen;
  for (const auto& tx : block->txs) {
    if (committed_.contains(tx.id) || !seen.insert(tx.id).second) {
      r.error = "transaction " + short_hex(tx.id) + " already committed";
      return r;
    }
  }

  r.cost = block_cost(*block);
  r.event.node = self_;
  r.event.block = block;
  r.event.per_tx.reserve(block->txs.size());
  for (std::size_t i = 0; i < block->txs.size(); ++i) {
    const auto& tx = block->txs[i];
    if (tx.is_private()) {
      r.private_txs.push_back(i);
    } else if (auto* c = contract(tx.contract)) {
      c->execute(tx.call);
      r.event.event_payload_bytes += c->event_payload_size();
    }
    committed_.emplace(tx.id, block->height);
    mempool_.erase(tx.id);
    r.event.per_tx.push_back(TxConfirmation{tx.id, commit_time});
  }
  chain_.push_back(block);
  r.ok = true;
  return r;
}

ReadResult Ledger::read(ContractAddress address, const std::string& key) const {
  const auto* c = contract(address);
  if (!c) return {};
  auto v = c->find(key);
  if (!v) return {};
  return {*v, true};
}

std::optional<std::uint64_t> Ledger::committed_height(const TxId& id) const {
  auto it = committed_.find(id);
  if (it == committed_.end()) return std::nullopt;
  return it->second;
}

bool Ledger::verify_chain() const {
  for (std::size_t h = 1; h < chain_.size(); ++h) {
    if (chain_[h]->height != h || chain_[h]->parent_hash != chain_[h - 1]->hash || !chain_[h]->verify_hash()) {
      return false;
    }
  }
  return true;
}

}  // namespace permledger::ledger
