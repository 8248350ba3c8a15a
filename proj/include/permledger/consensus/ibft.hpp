#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "permledger/consensus/engine.hpp"

namespace permledger::consensus {

// When the proposer fills its block.
enum class IbftPacing : std::uint8_t {
  // Drain the mempool when the height (or round) starts, seal the block
  // block_time after the parent. Transactions arriving in between wait for
  // the next height.
  DrainAtCommit,
  // Drain at the moment of proposal.
  DrainAtProposal,
};

enum class IbftBehavior : std::uint8_t {
  Honest,
  // Sends a different block to every peer when proposer; never votes.
  EquivocatingProposer,
  // Sends nothing at all.
  Silent,
};

const char* ibft_pacing_name(IbftPacing p);
const char* ibft_behavior_name(IbftBehavior b);

struct IbftConfig {
  std::uint32_t n = 4;  // n = 3f + 1
  std::uint32_t f = 1;
  sim::Duration block_time = sim::seconds(1);
  // Defaults to 2 * block_time.
  std::optional<sim::Duration> round_timeout;
  std::size_t max_txs = 4096;
  IbftPacing pacing = IbftPacing::DrainAtCommit;
  IbftBehavior behavior = IbftBehavior::Honest;

  sim::Duration round_timeout_value() const { return round_timeout ? *round_timeout : 2 * block_time; }
  std::uint32_t quorum() const { return 2 * f + 1; }
};

// Round-robin proposer: (height + round) mod n.
NodeId select_proposer(std::uint64_t height, std::uint64_t round, std::uint32_t n);

class IbftEngine final : public Engine {
 public:
  IbftEngine(NodeContext& ctx, IbftConfig cfg);

  void start() override;
  bool on_client_tx(Transaction tx) override;
  void on_message(NodeId from, const Message& m) override;
  void on_timer(std::uint64_t token) override;
  std::optional<NodeId> leader() const override { return select_proposer(height_, round_, cfg_.n); }
  const EngineStats& stats() const override { return stats_; }

  std::uint64_t height() const { return height_; }
  std::uint64_t round() const { return round_; }
  const BlockPtr& locked() const { return locked_; }

 private:
  enum Timer { kRound = 1, kPropose = 2 };
  using Votes = std::map<std::uint64_t, std::map<Hash256, std::set<NodeId>>>;

  bool honest() const { return cfg_.behavior == IbftBehavior::Honest; }
  bool is_proposer() const { return select_proposer(height_, round_, cfg_.n) == ctx_.self(); }
  bool has_work() const;
  void note_work();

  void start_height();
  void start_round(std::uint64_t round);
  void move_to_round(std::uint64_t round);
  void requeue_drained();
  void drain_into_candidate();
  void try_propose();
  void round_timer_fired();

  void handle_preprepare(NodeId from, const PrePrepare& m);
  void handle_prepare(NodeId from, const Prepare& m);
  void handle_commit(NodeId from, const Commit& m);
  void handle_round_change(NodeId from, const RoundChange& m);
  void record_prepare(NodeId from, std::uint64_t round, const Hash256& hash);
  void record_commit(NodeId from, std::uint64_t round, const Hash256& hash);
  void check_prepared();
  void finalize(const Hash256& hash, NodeId hint);
  void buffer(NodeId from, const Message& m);
  void replay_buffer();

  NodeContext& ctx_;
  IbftConfig cfg_;
  TimerSlots timers_;
  EngineStats stats_;

  std::uint64_t height_ = 1;
  std::uint64_t round_ = 0;
  std::optional<sim::SimTime> work_since_;
  BlockPtr proposal_;
  bool proposed_ = false;
  bool prepare_sent_ = false;
  bool commit_sent_ = false;
  Votes prepares_;
  Votes commits_;
  std::map<std::uint64_t, std::set<NodeId>> round_changes_;
  std::map<Hash256, BlockPtr> known_blocks_;
  BlockPtr locked_;
  std::optional<Hash256> awaiting_block_;

  // Transactions this node drained from its mempool as proposer at the
  // current height.
  std::vector<Transaction> drained_;
  std::unordered_set<ledger::TxId, ledger::Hash256Hasher> drained_ids_;

  std::vector<std::pair<NodeId, Message>> future_;
  bool replaying_ = false;
  bool replay_again_ = false;
};

}  // namespace permledger::consensus
