#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "permledger/consensus/messages.hpp"
#include "permledger/ledger/ledger.hpp"
#include "permledger/sim/rng.hpp"

namespace permledger::consensus {

// What an engine may do to the node hosting it. Implemented by node::Node.
class NodeContext {
 public:
  virtual ~NodeContext() = default;

  virtual NodeId self() const = 0;
  // Number of nodes taking part in consensus, ids 0 .. size-1.
  virtual std::uint32_t cluster_size() const = 0;
  virtual sim::SimTime now() const = 0;
  virtual ledger::Ledger& ledger() = 0;
  virtual sim::Rng& rng() = 0;

  virtual void send(NodeId to, Message m) = 0;
  // Sends to every other node.
  virtual void broadcast(const Message& m) = 0;
  // Calls Engine::on_timer(token) after `delay`.
  virtual void set_timer(sim::Duration delay, std::uint64_t token) = 0;
  // Runs `fn` at `when` unless the node has crashed by then.
  virtual void defer(sim::SimTime when, std::function<void()> fn) = 0;

  // Charges execution of `block` to the node's executor; returns the time it
  // finishes. Repeated calls for the same block hash are free.
  virtual sim::SimTime execute(const BlockPtr& block) = 0;
  // Appends a decided block to the local chain and emits its block event.
  virtual bool commit(const BlockPtr& block) = 0;
};

struct EngineStats {
  std::uint64_t blocks_proposed = 0;
  std::uint64_t leader_changes = 0;
  std::uint64_t elections = 0;
  std::uint64_t round_changes = 0;
  std::uint64_t equivocations_detected = 0;
  std::uint64_t invalid_proposals = 0;
};

// Consensus state machine driven by client transactions, peer messages and
// timers. Everything it does goes through the NodeContext.
class Engine {
 public:
  virtual ~Engine() = default;

  virtual void start() = 0;
  // A validated client transaction received by this node. Returns false for
  // a duplicate.
  virtual bool on_client_tx(Transaction tx) = 0;
  virtual void on_message(NodeId from, const Message& m) = 0;
  virtual void on_timer(std::uint64_t token) = 0;

  virtual std::optional<NodeId> leader() const = 0;
  virtual const EngineStats& stats() const = 0;
};

// Timer tokens carry a kind in the top byte and a generation below it, so a
// re-armed timer silently invalidates its older instances.
class TimerSlots {
 public:
  static constexpr int kKinds = 8;

  std::uint64_t arm(int kind) { return (static_cast<std::uint64_t>(kind) << 56) | ++gen_[kind]; }
  void disarm(int kind) { ++gen_[kind]; }
  // Returns the kind if `token` is current, otherwise -1.
  int match(std::uint64_t token) const {
    const int kind = static_cast<int>(token >> 56);
    if (kind < 0 || kind >= kKinds) return -1;
    return (token & ((1ULL << 56) - 1)) == gen_[kind] ? kind : -1;
  }

 private:
  std::uint64_t gen_[kKinds] = {};
};

}  // namespace permledger::consensus
