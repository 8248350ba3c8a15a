#include "permledger/ledger/mempool.hpp"

namespace permledger::ledger {

bool Mempool::is_live(const Entry& e) const {
  auto it = live_.find(e.tx.id);
  return it != live_.end() && it->second == e.generation;
}

bool Mempool::push(Transaction tx, sim::SimTime arrival) {
  const std::uint64_t gen = next_generation_++;
  if (!live_.emplace(tx.id, gen).second) return false;
  queue_.push_back(Entry{std::move(tx), arrival, gen});
  return true;
}

void Mempool::push_front(std::vector<Transaction> txs, sim::SimTime arrival) {
  for (auto it = txs.rbegin(); it != txs.rend(); ++it) {
    const std::uint64_t gen = next_generation_++;
    if (!live_.emplace(it->id, gen).second) continue;
    queue_.push_front(Entry{std::move(*it), arrival, gen});
  }
}

void Mempool::drop_dead_front() {
  while (!queue_.empty() && !is_live(queue_.front())) queue_.pop_front();
}

std::vector<Transaction> Mempool::drain(std::size_t max_txs, const std::function<bool(const TxId&)>& skip) {
  std::vector<Transaction> out;
  while (out.size() < max_txs && !queue_.empty()) {
    Entry e = std::move(queue_.front());
    queue_.pop_front();
    if (!is_live(e)) continue;
    live_.erase(e.tx.id);
    if (skip && skip(e.tx.id)) continue;
    out.push_back(std::move(e.tx));
  }
  drop_dead_front();
  return out;
}

bool Mempool::erase(const TxId& id) {
  if (live_.erase(id) == 0) return false;
  drop_dead_front();
  return true;
}

void Mempool::clear() {
  queue_.clear();
  live_.clear();
}

std::optional<sim::SimTime> Mempool::oldest_arrival() const {
  for (const auto& e : queue_) {
    if (is_live(e)) return e.arrival;
  }
  return std::nullopt;
}

}  // namespace permledger::ledger
