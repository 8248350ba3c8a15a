#pragma once

#include <algorithm>
#include <deque>
#include <memory>
#include <unordered_map>
#include <vector>

#include "permledger/harness/workload.hpp"
#include "permledger/node/cluster.hpp"

namespace permledger::harness {

// Per-round counts of one client.
struct RoundTally {
  std::uint64_t submitted = 0;
  std::uint64_t confirmed = 0;
  std::vector<double> latencies;
  std::vector<sim::SimTime> confirm_times;
};

struct ClientStats {
  std::uint64_t events_received = 0;
  std::uint64_t events_processed = 0;
  std::uint64_t failovers = 0;
  std::uint64_t rejected = 0;
  std::size_t max_queue_depth = 0;
};

// A benchmark client. Submission and event handling are decoupled: block
// events land in an unbounded FIFO that a separate processor step drains, so
// a burst of events never blocks or drops anything.
//
// If a submission is not acknowledged within ack_timeout the client moves to
// the next peer, resubscribes there and resubmits everything unconfirmed.
class BenchClient final : public node::ClientSink {
 public:
  BenchClient(ledger::ClientId id, node::Cluster& cluster, NodeId peer, sim::Duration ack_timeout);

  ledger::ClientId id() const { return id_; }
  NodeId peer() const { return peer_; }

  void send(Request request);

  void on_ack(const ledger::TxId& tx, ledger::SubmitError error) override;
  void on_block_event(const std::shared_ptr<const ledger::BlockEvent>& event) override;
  void on_read_response(std::uint64_t request_id, const ledger::ReadResult& result) override;

  void begin_round();
  // Returns the tally and forgets requests still outstanding.
  RoundTally end_round();
  const RoundTally& tally() const { return tally_; }
  std::size_t outstanding() const { return pending_.size() + reads_.size(); }
  std::size_t queue_depth() const { return queue_.size(); }
  const ClientStats& stats() const { return stats_; }

 private:
  struct Pending {
    ledger::Transaction tx;
    sim::SimTime sent;
    bool acked = false;
  };

  void submit(const ledger::Transaction& tx);
  void process_queue();
  void confirm(const ledger::TxId& id);
  void arm_watchdog(sim::SimTime at);
  void watchdog();
  void failover();

  ledger::ClientId id_;
  node::Cluster& cluster_;
  NodeId peer_;
  sim::Duration ack_timeout_;

  std::unordered_map<ledger::TxId, Pending, ledger::Hash256Hasher> pending_;
  // Submission order for ack-timeout checks: (time sent to current peer, id).
  std::deque<std::pair<sim::SimTime, ledger::TxId>> unacked_;
  bool watchdog_armed_ = false;

  std::unordered_map<std::uint64_t, sim::SimTime> reads_;
  std::uint64_t next_read_ = 0;

  std::deque<std::shared_ptr<const ledger::BlockEvent>> queue_;
  bool drain_scheduled_ = false;

  RoundTally tally_;
  ClientStats stats_;
};

}  // namespace permledger::harness
