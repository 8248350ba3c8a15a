#include "permledger/consensus/ibft.hpp"

#include <algorithm>
#include <memory>

namespace permledger::consensus {

const char* ibft_pacing_name(IbftPacing p) {
  return p == IbftPacing::DrainAtCommit ? "drain-at-commit" : "drain-at-proposal";
}

const char* ibft_behavior_name(IbftBehavior b) {
  switch (b) {
    case IbftBehavior::Honest: return "honest";
    case IbftBehavior::EquivocatingProposer: return "equivocating-proposer";
    case IbftBehavior::Silent: return "silent";
  }
  return "unknown";
}

NodeId select_proposer(std::uint64_t height, std::uint64_t round, std::uint32_t n) {
  return static_cast<NodeId>((height + round) % n);
}

IbftEngine::IbftEngine(NodeContext& ctx, IbftConfig cfg) : ctx_(ctx), cfg_(cfg) {}

void IbftEngine::start() { start_height(); }

bool IbftEngine::has_work() const {
  return !ctx_.ledger().mempool().empty() || !drained_.empty() || proposal_ || locked_;
}

void IbftEngine::note_work() {
  if (!work_since_) work_since_ = ctx_.now();
}

void IbftEngine::start_height() {
  height_ = ctx_.ledger().height() + 1;
  prepares_.clear();
  commits_.clear();
  round_changes_.clear();
  known_blocks_.clear();
  locked_.reset();
  awaiting_block_.reset();
  start_round(0);
}

void IbftEngine::start_round(std::uint64_t round) {
  round_ = round;
  proposal_.reset();
  proposed_ = false;
  prepare_sent_ = false;
  commit_sent_ = false;
  work_since_.reset();
  if (has_work()) work_since_ = ctx_.now();
  ctx_.set_timer(cfg_.round_timeout_value(), timers_.arm(kRound));
  timers_.disarm(kPropose);
  if (is_proposer() && cfg_.behavior != IbftBehavior::Silent) {
    if (cfg_.pacing == IbftPacing::DrainAtCommit && !locked_) drain_into_candidate();
    const auto earliest = ctx_.ledger().tip()->timestamp + cfg_.block_time;
    const auto at = std::max(ctx_.now(), earliest);
    ctx_.set_timer(at - ctx_.now(), timers_.arm(kPropose));
  }
  replay_buffer();
}

void IbftEngine::move_to_round(std::uint64_t round) {
  if (round <= round_) return;
  ++stats_.round_changes;
  requeue_drained();
  start_round(round);
}

void IbftEngine::requeue_drained() {
  if (drained_.empty()) return;
  std::vector<Transaction> back;
  for (auto& tx : drained_) {
    if (!ctx_.ledger().is_committed(tx.id)) back.push_back(std::move(tx));
  }
  drained_.clear();
  drained_ids_.clear();
  ctx_.ledger().mempool().push_front(std::move(back), ctx_.now());
}

void IbftEngine::drain_into_candidate() {
  if (drained_.size() >= cfg_.max_txs) return;
  auto& ledger = ctx_.ledger();
  auto txs = ledger.mempool().drain(cfg_.max_txs - drained_.size(),
                                    [&](const ledger::TxId& id) { return ledger.is_committed(id); });
  for (auto& tx : txs) {
    drained_ids_.insert(tx.id);
    drained_.push_back(std::move(tx));
  }
}

void IbftEngine::try_propose() {
  if (!is_proposer() || proposed_ || cfg_.behavior == IbftBehavior::Silent) return;
  BlockPtr block = locked_;
  if (!block) {
    if (cfg_.pacing == IbftPacing::DrainAtProposal || drained_.empty()) drain_into_candidate();
    if (drained_.empty()) {
      ctx_.set_timer(cfg_.block_time, timers_.arm(kPropose));
      return;
    }
    auto b = std::make_shared<ledger::Block>();
    b->height = height_;
    b->parent_hash = ctx_.ledger().tip()->hash;
    b->proposer = ctx_.self();
    b->timestamp = ctx_.now();
    b->txs = drained_;
    b->seal();
    block = b;
  }
  proposed_ = true;
  ++stats_.blocks_proposed;
  note_work();
  if (cfg_.behavior == IbftBehavior::EquivocatingProposer) {
    for (NodeId p = 0; p < ctx_.cluster_size(); ++p) {
      if (p == ctx_.self()) continue;
      auto variant = std::make_shared<ledger::Block>(*block);
      variant->timestamp += sim::Duration{p + 1};
      variant->seal();
      ctx_.send(p, PrePrepare{height_, round_, variant});
    }
    return;
  }
  const PrePrepare pp{height_, round_, block};
  ctx_.broadcast(pp);
  handle_preprepare(ctx_.self(), pp);
}

void IbftEngine::on_timer(std::uint64_t token) {
  switch (timers_.match(token)) {
    case kRound: round_timer_fired(); break;
    case kPropose: try_propose(); break;
    default: break;
  }
}

void IbftEngine::round_timer_fired() {
  const auto timeout = cfg_.round_timeout_value();
  if (!has_work()) {
    work_since_.reset();
    ctx_.set_timer(timeout, timers_.arm(kRound));
    return;
  }
  note_work();
  const auto deadline = *work_since_ + timeout;
  if (ctx_.now() < deadline) {
    ctx_.set_timer(deadline - ctx_.now(), timers_.arm(kRound));
    return;
  }
  const std::uint64_t next = round_ + 1;
  if (honest()) {
    ctx_.broadcast(RoundChange{height_, next});
    round_changes_[next].insert(ctx_.self());
  }
  move_to_round(next);
}

bool IbftEngine::on_client_tx(Transaction tx) {
  if (drained_ids_.contains(tx.id)) return false;
  if (ctx_.ledger().submit(tx, ctx_.now()) != ledger::SubmitError::None) return false;
  note_work();
  ctx_.broadcast(TxGossip{std::move(tx)});
  return true;
}

void IbftEngine::on_message(NodeId from, const Message& m) {
  if (const auto* g = std::get_if<TxGossip>(&m)) {
    if (!drained_ids_.contains(g->tx.id) && ctx_.ledger().submit(g->tx, ctx_.now()) == ledger::SubmitError::None) {
      note_work();
    }
  } else if (const auto* pp = std::get_if<PrePrepare>(&m)) {
    handle_preprepare(from, *pp);
  } else if (const auto* p = std::get_if<Prepare>(&m)) {
    handle_prepare(from, *p);
  } else if (const auto* c = std::get_if<Commit>(&m)) {
    handle_commit(from, *c);
  } else if (const auto* rc = std::get_if<RoundChange>(&m)) {
    handle_round_change(from, *rc);
  } else if (const auto* req = std::get_if<BlockRequest>(&m)) {
    if (cfg_.behavior == IbftBehavior::Silent) return;
    const auto& ledger = ctx_.ledger();
    if (req->height <= ledger.height() && ledger.block_at(req->height)->hash == req->hash) {
      ctx_.send(from, BlockResponse{ledger.block_at(req->height)});
    } else if (auto it = known_blocks_.find(req->hash); it != known_blocks_.end()) {
      ctx_.send(from, BlockResponse{it->second});
    }
  } else if (const auto* resp = std::get_if<BlockResponse>(&m)) {
    const auto& b = resp->block;
    if (b && awaiting_block_ && b->hash == *awaiting_block_ && b->height == height_ && b->verify_hash()) {
      known_blocks_[b->hash] = b;
      finalize(b->hash, from);
    }
  }
}

void IbftEngine::buffer(NodeId from, const Message& m) { future_.emplace_back(from, m); }

void IbftEngine::replay_buffer() {
  if (replaying_) {
    replay_again_ = true;
    return;
  }
  replaying_ = true;
  do {
    replay_again_ = false;
    auto pending = std::move(future_);
    future_.clear();
    for (auto& [from, m] : pending) on_message(from, m);
  } while (replay_again_);
  replaying_ = false;
}

void IbftEngine::handle_preprepare(NodeId from, const PrePrepare& m) {
  if (m.height > height_ || (m.height == height_ && m.round > round_)) {
    buffer(from, m);
    return;
  }
  if (m.height < height_ || m.round < round_) return;
  if (from != select_proposer(height_, round_, cfg_.n) || !m.block) {
    ++stats_.invalid_proposals;
    return;
  }
  const auto& b = *m.block;
  const auto& ledger = ctx_.ledger();
  bool valid = b.height == height_ && b.parent_hash == ledger.tip()->hash && b.verify_hash() && !b.txs.empty();
  for (std::size_t i = 0; valid && i < b.txs.size(); ++i) valid = !ledger.is_committed(b.txs[i].id);
  if (!valid) {
    ++stats_.invalid_proposals;
    return;
  }
  if (proposal_) {
    if (proposal_->hash != b.hash) ++stats_.equivocations_detected;
    return;
  }
  if (locked_ && locked_->hash != b.hash) return;
  proposal_ = m.block;
  known_blocks_[b.hash] = m.block;
  note_work();
  if (!honest()) return;

  const sim::SimTime ready = ctx_.execute(m.block);
  const auto height = height_;
  const auto round = round_;
  const auto hash = b.hash;
  ctx_.defer(ready, [this, height, round, hash] {
    if (height_ != height || round_ != round || prepare_sent_ || !proposal_ || proposal_->hash != hash) return;
    prepare_sent_ = true;
    ctx_.broadcast(Prepare{height, round, hash});
    record_prepare(ctx_.self(), round, hash);
  });
  // Commits may already have reached quorum for this block.
  for (const auto& [r, by_hash] : commits_) {
    auto it = by_hash.find(hash);
    if (it != by_hash.end() && it->second.size() >= cfg_.quorum()) {
      finalize(hash, *it->second.begin());
      return;
    }
  }
}

void IbftEngine::handle_prepare(NodeId from, const Prepare& m) {
  if (m.height > height_) {
    buffer(from, m);
    return;
  }
  if (m.height < height_) return;
  if (proposal_ && m.round == round_ && m.hash != proposal_->hash) {
    ++stats_.equivocations_detected;
    return;
  }
  record_prepare(from, m.round, m.hash);
}

void IbftEngine::handle_commit(NodeId from, const Commit& m) {
  if (m.height > height_) {
    buffer(from, m);
    return;
  }
  if (m.height < height_) return;
  if (proposal_ && m.round == round_ && m.hash != proposal_->hash) {
    ++stats_.equivocations_detected;
    return;
  }
  record_commit(from, m.round, m.hash);
}

void IbftEngine::record_prepare(NodeId from, std::uint64_t round, const Hash256& hash) {
  prepares_[round][hash].insert(from);
  check_prepared();
}

void IbftEngine::check_prepared() {
  if (!honest() || !proposal_ || !prepare_sent_ || commit_sent_) return;
  auto rit = prepares_.find(round_);
  if (rit == prepares_.end()) return;
  auto hit = rit->second.find(proposal_->hash);
  if (hit == rit->second.end() || hit->second.size() < cfg_.quorum()) return;
  commit_sent_ = true;
  locked_ = proposal_;
  const Commit c{height_, round_, proposal_->hash};
  ctx_.broadcast(c);
  record_commit(ctx_.self(), round_, c.hash);
}

void IbftEngine::record_commit(NodeId from, std::uint64_t round, const Hash256& hash) {
  auto& senders = commits_[round][hash];
  senders.insert(from);
  if (senders.size() >= cfg_.quorum()) finalize(hash, from == ctx_.self() ? *senders.begin() : from);
}

void IbftEngine::finalize(const Hash256& hash, NodeId hint) {
  auto it = known_blocks_.find(hash);
  if (it == known_blocks_.end()) {
    if (awaiting_block_ != hash) {
      awaiting_block_ = hash;
      if (hint == ctx_.self()) hint = (hint + 1) % ctx_.cluster_size();
      ctx_.send(hint, BlockRequest{height_, hash});
    }
    return;
  }
  const BlockPtr block = it->second;
  if (!ctx_.commit(block)) return;
  timers_.disarm(kPropose);
  requeue_drained();
  start_height();
}

void IbftEngine::handle_round_change(NodeId from, const RoundChange& m) {
  if (m.height > height_) {
    buffer(from, m);
    return;
  }
  if (m.height < height_ || m.round <= round_) return;
  auto& senders = round_changes_[m.round];
  senders.insert(from);
  if (senders.size() >= cfg_.f + 1) {
    if (honest() && !senders.contains(ctx_.self())) {
      ctx_.broadcast(RoundChange{height_, m.round});
      senders.insert(ctx_.self());
    }
    move_to_round(m.round);
  }
}

}  // namespace permledger::consensus
