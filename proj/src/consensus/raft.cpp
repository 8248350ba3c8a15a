#include "permledger/consensus/raft.hpp"

#include <algorithm>
#include <memory>

namespace permledger::consensus {

sim::Duration RaftConfig::heartbeat_interval() const {
  if (heartbeat) return *heartbeat;
  return std::min(block_time, sim::millis(25));
}

const char* raft_role_name(RaftRole r) {
  switch (r) {
    case RaftRole::Follower: return "follower";
    case RaftRole::Candidate: return "candidate";
    case RaftRole::Leader: return "leader";
    case RaftRole::Learner: return "learner";
  }
  return "unknown";
}

RaftEngine::RaftEngine(NodeContext& ctx, RaftConfig cfg)
    : ctx_(ctx), cfg_(cfg), role_(is_voter(ctx.self()) ? RaftRole::Follower : RaftRole::Learner) {
  log_.push_back(LogEntry{0, ctx_.ledger().tip()});
  next_index_.assign(ctx_.cluster_size(), 1);
  match_index_.assign(ctx_.cluster_size(), 0);
}

void RaftEngine::start() {
  if (cfg_.bootstrap_leader) {
    term_ = 1;
    leader_ = 0;
    voted_for_ = 0;
    if (ctx_.self() == 0) {
      role_ = RaftRole::Leader;
      ++stats_.leader_changes;
      next_index_.assign(ctx_.cluster_size(), last_index() + 1);
      match_index_.assign(ctx_.cluster_size(), 0);
      ctx_.set_timer(cfg_.block_time, timers_.arm(kBlock));
      ctx_.set_timer(cfg_.heartbeat_interval(), timers_.arm(kHeartbeat));
      return;
    }
  }
  if (role_ != RaftRole::Learner) arm_election();
}

const ledger::Block& RaftEngine::last_block() const {
  for (std::size_t i = log_.size(); i-- > 0;) {
    if (log_[i].block) return *log_[i].block;
  }
  return *ctx_.ledger().tip();
}

void RaftEngine::arm_election() {
  ctx_.set_timer(ctx_.rng().uniform(cfg_.election_min, cfg_.election_max), timers_.arm(kElection));
}

void RaftEngine::on_timer(std::uint64_t token) {
  switch (timers_.match(token)) {
    case kElection:
      if (role_ == RaftRole::Follower || role_ == RaftRole::Candidate) start_election();
      break;
    case kHeartbeat:
      if (role_ == RaftRole::Leader) {
        broadcast_append();
        ctx_.set_timer(cfg_.heartbeat_interval(), timers_.arm(kHeartbeat));
      }
      break;
    case kBlock:
      tick_block();
      break;
    default:
      break;
  }
}

void RaftEngine::start_election() {
  role_ = RaftRole::Candidate;
  ++term_;
  ++stats_.elections;
  voted_for_ = ctx_.self();
  leader_.reset();
  votes_ = {ctx_.self()};
  arm_election();
  if (votes_.size() >= cfg_.majority()) {
    become_leader();
    return;
  }
  const RequestVote rv{term_, ctx_.self(), last_index(), term_at(last_index())};
  for (NodeId p = 0; p < cfg_.voters; ++p) {
    if (p != ctx_.self()) ctx_.send(p, rv);
  }
}

void RaftEngine::become_follower(std::uint64_t term) {
  if (role_ == RaftRole::Leader) {
    ctx_.ledger().mempool().clear();
    timers_.disarm(kBlock);
    timers_.disarm(kHeartbeat);
  }
  if (term > term_) {
    term_ = term;
    voted_for_.reset();
  }
  if (role_ != RaftRole::Learner) {
    role_ = RaftRole::Follower;
    arm_election();
  }
}

void RaftEngine::become_leader() {
  role_ = RaftRole::Leader;
  leader_ = ctx_.self();
  ++stats_.leader_changes;
  timers_.disarm(kElection);
  log_.push_back(LogEntry{term_, nullptr});
  replicable_ = last_index();
  next_index_.assign(ctx_.cluster_size(), last_index());
  match_index_.assign(ctx_.cluster_size(), 0);
  forward_own_pending();
  ctx_.set_timer(cfg_.block_time, timers_.arm(kBlock));
  ctx_.set_timer(cfg_.heartbeat_interval(), timers_.arm(kHeartbeat));
  advance_commit();
  broadcast_append();
}

void RaftEngine::observe_leader(NodeId leader) {
  if (leader_ == leader) return;
  leader_ = leader;
  forward_own_pending();
}

void RaftEngine::forward_own_pending() {
  auto& ledger = ctx_.ledger();
  std::deque<Transaction> keep;
  for (auto& tx : own_pending_) {
    if (!own_pending_ids_.contains(tx.id)) continue;
    if (ledger.is_committed(tx.id)) {
      own_pending_ids_.erase(tx.id);
      continue;
    }
    keep.push_back(std::move(tx));
  }
  own_pending_ = std::move(keep);
  if (!leader_) return;
  for (const auto& tx : own_pending_) {
    if (*leader_ == ctx_.self()) {
      accept_tx(tx);
    } else {
      ctx_.send(*leader_, ForwardTx{tx});
    }
  }
}

bool RaftEngine::on_client_tx(Transaction tx) {
  if (!own_pending_ids_.insert(tx.id).second) return false;
  own_pending_.push_back(tx);
  if (role_ == RaftRole::Leader) {
    accept_tx(std::move(tx));
  } else if (leader_) {
    ctx_.send(*leader_, ForwardTx{std::move(tx)});
  }
  return true;
}

void RaftEngine::accept_tx(Transaction tx) {
  if (log_tx_ids_.contains(tx.id)) return;
  ctx_.ledger().submit(std::move(tx), ctx_.now());
}

void RaftEngine::tick_block() {
  if (role_ != RaftRole::Leader) return;
  ctx_.set_timer(cfg_.block_time, timers_.arm(kBlock));
  auto made = ctx_.ledger().make_block(last_block(), cfg_.max_txs, ctx_.now(), ctx_.self(),
                                       [this](const ledger::TxId& id) { return log_tx_ids_.contains(id); });
  if (!made) return;
  auto block = std::make_shared<const ledger::Block>(std::move(*made));
  for (const auto& tx : block->txs) log_tx_ids_.insert(tx.id);
  log_.push_back(LogEntry{term_, block});
  ++stats_.blocks_proposed;
  const std::uint64_t index = last_index();
  const std::uint64_t term = term_;
  const sim::SimTime ready = ctx_.execute(block);
  ctx_.defer(ready, [this, term, index] {
    if (role_ != RaftRole::Leader || term_ != term) return;
    replicable_ = std::max(replicable_, index);
    advance_commit();
    broadcast_append();
  });
}

void RaftEngine::send_append(NodeId to) {
  AppendEntries m;
  m.term = term_;
  m.leader = ctx_.self();
  const std::uint64_t next = std::clamp<std::uint64_t>(next_index_[to], 1, replicable_ + 1);
  m.prev_index = next - 1;
  m.prev_term = term_at(m.prev_index);
  for (std::uint64_t i = next; i <= replicable_; ++i) m.entries.push_back(log_[i]);
  m.leader_commit = commit_;
  if (!m.entries.empty()) next_index_[to] = replicable_ + 1;
  ctx_.send(to, std::move(m));
}

void RaftEngine::broadcast_append() {
  for (NodeId p = 0; p < ctx_.cluster_size(); ++p) {
    if (p != ctx_.self()) send_append(p);
  }
}

void RaftEngine::advance_commit() {
  if (role_ != RaftRole::Leader) return;
  const std::uint64_t old = commit_;
  for (std::uint64_t n = replicable_; n > commit_; --n) {
    if (term_at(n) != term_) break;
    std::uint32_t acks = 1;
    for (NodeId p = 0; p < cfg_.voters; ++p) {
      if (p != ctx_.self() && match_index_[p] >= n) ++acks;
    }
    if (acks >= cfg_.majority()) {
      commit_ = n;
      break;
    }
  }
  if (commit_ != old) {
    apply_committed();
    broadcast_append();
  }
}

void RaftEngine::apply_committed() {
  while (applied_ < commit_) {
    ++applied_;
    const auto& block = log_[applied_].block;
    if (!block) continue;
    ctx_.commit(block);
    for (const auto& tx : block->txs) {
      log_tx_ids_.erase(tx.id);
      own_pending_ids_.erase(tx.id);
    }
  }
}

void RaftEngine::on_message(NodeId from, const Message& m) {
  if (const auto* a = std::get_if<AppendEntries>(&m)) {
    handle_append(from, *a);
  } else if (const auto* r = std::get_if<AppendResponse>(&m)) {
    handle_append_response(from, *r);
  } else if (const auto* v = std::get_if<RequestVote>(&m)) {
    handle_vote_request(from, *v);
  } else if (const auto* vr = std::get_if<VoteResponse>(&m)) {
    handle_vote_response(from, *vr);
  } else if (const auto* f = std::get_if<ForwardTx>(&m)) {
    if (role_ == RaftRole::Leader) accept_tx(f->tx);
  }
}

void RaftEngine::handle_append(NodeId from, const AppendEntries& m) {
  const bool heartbeat = m.entries.empty();
  if (m.term < term_) {
    ctx_.send(from, AppendResponse{term_, false, last_index(), heartbeat});
    return;
  }
  if (m.term > term_ || role_ == RaftRole::Candidate || role_ == RaftRole::Leader) {
    become_follower(m.term);
  } else if (role_ == RaftRole::Follower) {
    arm_election();
  }
  observe_leader(m.leader);

  if (m.prev_index > last_index() || term_at(m.prev_index) != m.prev_term) {
    const std::uint64_t hint = m.prev_index > last_index() ? last_index() : m.prev_index - 1;
    ctx_.send(from, AppendResponse{term_, false, hint, heartbeat});
    return;
  }
  std::uint64_t index = m.prev_index;
  for (const auto& e : m.entries) {
    ++index;
    if (index <= last_index()) {
      if (term_at(index) == e.term) continue;
      for (std::uint64_t i = index; i <= last_index(); ++i) {
        if (log_[i].block) {
          for (const auto& tx : log_[i].block->txs) log_tx_ids_.erase(tx.id);
        }
      }
      log_.resize(index);
    }
    log_.push_back(e);
    if (e.block) {
      for (const auto& tx : e.block->txs) log_tx_ids_.insert(tx.id);
    }
  }
  const std::uint64_t match = m.prev_index + m.entries.size();
  if (m.leader_commit > commit_) {
    commit_ = std::max(commit_, std::min(m.leader_commit, match));
    apply_committed();
  }
  ctx_.send(from, AppendResponse{term_, true, match, heartbeat});
}

void RaftEngine::handle_append_response(NodeId from, const AppendResponse& m) {
  if (m.term > term_) {
    become_follower(m.term);
    leader_.reset();
    return;
  }
  if (role_ != RaftRole::Leader || m.term != term_) return;
  if (m.success) {
    match_index_[from] = std::max(match_index_[from], m.match_index);
    next_index_[from] = std::max(next_index_[from], m.match_index + 1);
    advance_commit();
  } else {
    next_index_[from] = std::max<std::uint64_t>(1, std::min(next_index_[from], m.match_index + 1));
    send_append(from);
  }
}

void RaftEngine::handle_vote_request(NodeId from, const RequestVote& m) {
  if (role_ == RaftRole::Learner) return;
  if (m.term > term_) {
    become_follower(m.term);
    leader_.reset();
  }
  const bool up_to_date = m.last_term > term_at(last_index()) ||
                          (m.last_term == term_at(last_index()) && m.last_index >= last_index());
  const bool grant = m.term == term_ && (!voted_for_ || *voted_for_ == m.candidate) && up_to_date;
  if (grant) {
    voted_for_ = m.candidate;
    arm_election();
  }
  ctx_.send(from, VoteResponse{term_, grant});
}

void RaftEngine::handle_vote_response(NodeId from, const VoteResponse& m) {
  if (m.term > term_) {
    become_follower(m.term);
    leader_.reset();
    return;
  }
  if (role_ != RaftRole::Candidate || m.term != term_ || !m.granted) return;
  votes_.insert(from);
  if (votes_.size() >= cfg_.majority()) become_leader();
}

}  // namespace permledger::consensus
