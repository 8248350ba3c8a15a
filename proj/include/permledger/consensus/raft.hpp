#pragma once

#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

#include "permledger/consensus/engine.hpp"

namespace permledger::consensus {

struct RaftConfig {
  std::uint32_t voters = 3;  // n = 2f + 1
  std::uint32_t f = 1;
  // Non-voting replicas with ids voters .. voters+learners-1.
  std::uint32_t learners = 0;
  sim::Duration block_time = sim::millis(50);
  sim::Duration election_min = sim::millis(150);
  sim::Duration election_max = sim::millis(300);
  // Defaults to min(block_time, 25 ms).
  std::optional<sim::Duration> heartbeat;
  std::size_t max_txs = 4096;
  // Node 0 starts as leader of term 1, so an idle cluster sends no votes.
  bool bootstrap_leader = true;

  sim::Duration heartbeat_interval() const;
  std::uint32_t majority() const { return voters / 2 + 1; }
};

enum class RaftRole : std::uint8_t { Follower, Candidate, Leader, Learner };

const char* raft_role_name(RaftRole r);

class RaftEngine final : public Engine {
 public:
  RaftEngine(NodeContext& ctx, RaftConfig cfg);

  void start() override;
  bool on_client_tx(Transaction tx) override;
  void on_message(NodeId from, const Message& m) override;
  void on_timer(std::uint64_t token) override;
  std::optional<NodeId> leader() const override { return leader_; }
  const EngineStats& stats() const override { return stats_; }

  RaftRole role() const { return role_; }
  std::uint64_t term() const { return term_; }
  std::uint64_t commit_index() const { return commit_; }
  std::uint64_t last_index() const { return log_.size() - 1; }
  const std::vector<LogEntry>& log() const { return log_; }

  // Exposed for tests.
  void handle_append(NodeId from, const AppendEntries& m);
  void force_election_timeout() { start_election(); }

 private:
  enum Timer { kElection = 1, kHeartbeat = 2, kBlock = 3 };

  bool is_voter(NodeId id) const { return id < cfg_.voters; }
  std::uint64_t term_at(std::uint64_t index) const { return log_[index].term; }
  const ledger::Block& last_block() const;

  void arm_election();
  void start_election();
  void become_follower(std::uint64_t term);
  void become_leader();
  void observe_leader(NodeId leader);

  void tick_block();
  void accept_tx(Transaction tx);
  void send_append(NodeId to);
  void broadcast_append();
  void advance_commit();
  void apply_committed();
  void forward_own_pending();

  void handle_append_response(NodeId from, const AppendResponse& m);
  void handle_vote_request(NodeId from, const RequestVote& m);
  void handle_vote_response(NodeId from, const VoteResponse& m);

  NodeContext& ctx_;
  RaftConfig cfg_;
  TimerSlots timers_;
  EngineStats stats_;

  RaftRole role_;
  std::uint64_t term_ = 0;
  std::optional<NodeId> voted_for_;
  std::optional<NodeId> leader_;
  std::vector<LogEntry> log_;
  std::uint64_t commit_ = 0;
  std::uint64_t applied_ = 0;
  std::unordered_set<NodeId> votes_;

  // Leader bookkeeping, indexed by node id.
  std::vector<std::uint64_t> next_index_;
  std::vector<std::uint64_t> match_index_;
  // Highest own entry whose execution has finished and may be replicated.
  std::uint64_t replicable_ = 0;
  std::unordered_set<ledger::TxId, ledger::Hash256Hasher> log_tx_ids_;

  // Transactions this node accepted from its clients and has not yet seen
  // committed. Re-forwarded whenever a new leader appears.
  std::deque<Transaction> own_pending_;
  std::unordered_set<ledger::TxId, ledger::Hash256Hasher> own_pending_ids_;
};

}  // namespace permledger::consensus
