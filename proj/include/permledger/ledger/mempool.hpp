#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "permledger/ledger/types.hpp"

namespace permledger::ledger {

// Per-node FIFO of pending transactions keyed by tx id. Removal by id is
// lazy: erased entries are skipped when they reach the front.
class Mempool {
 public:
  // False if a transaction with the same id is already pending.
  bool push(Transaction tx, sim::SimTime arrival);
  // Requeues in front, preserving the given order. Ids already pending are skipped.
  void push_front(std::vector<Transaction> txs, sim::SimTime arrival);

  // Removes up to max_txs transactions in arrival order. Entries for which
  // `skip` returns true are discarded without being counted.
  std::vector<Transaction> drain(std::size_t max_txs,
                                 const std::function<bool(const TxId&)>& skip = {});

  bool erase(const TxId& id);
  void clear();
  bool contains(const TxId& id) const { return live_.contains(id); }
  std::size_t size() const { return live_.size(); }
  bool empty() const { return live_.empty(); }
  std::optional<sim::SimTime> oldest_arrival() const;

 private:
  struct Entry {
    Transaction tx;
    sim::SimTime arrival;
    std::uint64_t generation;
  };

  bool is_live(const Entry& e) const;
  void drop_dead_front();

  std::deque<Entry> queue_;
  // id -> generation of its live queue entry
  std::unordered_map<TxId, std::uint64_t, Hash256Hasher> live_;
  std::uint64_t next_generation_ = 0;
};

}  // namespace permledger::ledger
