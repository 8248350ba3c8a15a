#include "permledger/harness/client.hpp"

#include <algorithm>

#include "permledger/harness/metrics.hpp"

namespace permledger::harness {

BenchClient::BenchClient(ledger::ClientId id, node::Cluster& cluster, NodeId peer, sim::Duration ack_timeout)
    : id_(id), cluster_(cluster), peer_(peer), ack_timeout_(ack_timeout) {
  cluster_.register_client(id_, this);
  cluster_.subscribe(id_, peer_);
}

void BenchClient::send(Request request) {
  ++tally_.submitted;
  const auto now = cluster_.scheduler().now();
  if (auto* read = std::get_if<ReadRequest>(&request)) {
    const auto rid = next_read_++;
    reads_.emplace(rid, now);
    cluster_.read(id_, peer_, rid, read->contract, std::move(read->key));
    return;
  }
  auto& tx = std::get<ledger::Transaction>(request);
  tx.submit_time = now;
  auto [it, inserted] = pending_.emplace(tx.id, Pending{tx, now, false});
  if (!inserted) return;
  submit(it->second.tx);
}

void BenchClient::submit(const ledger::Transaction& tx) {
  const auto now = cluster_.scheduler().now();
  unacked_.emplace_back(now, tx.id);
  cluster_.submit(id_, peer_, tx);
  if (!watchdog_armed_) arm_watchdog(now + ack_timeout_);
}

void BenchClient::arm_watchdog(sim::SimTime at) {
  watchdog_armed_ = true;
  cluster_.scheduler().schedule_at(at, sim::client_actor(id_), [this] { watchdog(); });
}

void BenchClient::watchdog() {
  watchdog_armed_ = false;
  while (!unacked_.empty()) {
    auto it = pending_.find(unacked_.front().second);
    if (it == pending_.end() || it->second.acked) {
      unacked_.pop_front();
      continue;
    }
    break;
  }
  if (unacked_.empty()) return;
  const auto now = cluster_.scheduler().now();
  const auto deadline = unacked_.front().first + ack_timeout_;
  if (now >= deadline) {
    failover();
  } else {
    arm_watchdog(deadline);
  }
}

void BenchClient::failover() {
  ++stats_.failovers;
  peer_ = (peer_ + 1) % cluster_.size();
  cluster_.subscribe(id_, peer_);
  unacked_.clear();
  // Resubmit in original send order so ids stay deterministic.
  std::vector<const Pending*> order;
  order.reserve(pending_.size());
  for (auto& [id, p] : pending_) {
    p.acked = false;
    order.push_back(&p);
  }
  std::sort(order.begin(), order.end(), [](const Pending* a, const Pending* b) {
    return a->sent != b->sent ? a->sent < b->sent : a->tx.id < b->tx.id;
  });
  for (const auto* p : order) submit(p->tx);
}

void BenchClient::on_ack(const ledger::TxId& tx, ledger::SubmitError error) {
  auto it = pending_.find(tx);
  if (it == pending_.end()) return;
  if (error != ledger::SubmitError::None) {
    // A rejected request is never confirmed; it counts as failed.
    ++stats_.rejected;
    pending_.erase(it);
    return;
  }
  it->second.acked = true;
}

void BenchClient::on_block_event(const std::shared_ptr<const ledger::BlockEvent>& event) {
  ++stats_.events_received;
  queue_.push_back(event);
  stats_.max_queue_depth = std::max(stats_.max_queue_depth, queue_.size());
  if (!drain_scheduled_) {
    drain_scheduled_ = true;
    cluster_.scheduler().schedule(sim::Duration::zero(), sim::client_actor(id_), [this] { process_queue(); });
  }
}

void BenchClient::process_queue() {
  drain_scheduled_ = false;
  while (!queue_.empty()) {
    auto event = std::move(queue_.front());
    queue_.pop_front();
    ++stats_.events_processed;
    for (const auto& c : event->per_tx) confirm(c.tx_id);
  }
}

void BenchClient::confirm(const ledger::TxId& id) {
  auto it = pending_.find(id);
  if (it == pending_.end()) return;
  const auto now = cluster_.scheduler().now();
  ++tally_.confirmed;
  tally_.latencies.push_back(tx_latency(it->second.sent, now));
  tally_.confirm_times.push_back(now);
  pending_.erase(it);
}

void BenchClient::on_read_response(std::uint64_t request_id, const ledger::ReadResult&) {
  auto it = reads_.find(request_id);
  if (it == reads_.end()) return;
  const auto now = cluster_.scheduler().now();
  ++tally_.confirmed;
  tally_.latencies.push_back(tx_latency(it->second, now));
  tally_.confirm_times.push_back(now);
  reads_.erase(it);
}

void BenchClient::begin_round() { tally_ = RoundTally{}; }

RoundTally BenchClient::end_round() {
  pending_.clear();
  unacked_.clear();
  reads_.clear();
  return std::exchange(tally_, RoundTally{});
}

}  // namespace permledger::harness
