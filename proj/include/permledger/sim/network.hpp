#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "permledger/sim/kernel.hpp"
#include "permledger/sim/rng.hpp"

namespace permledger::sim {

// Point-to-point link parameters. Defaults model a 1 Gbps switched LAN.
struct NetworkModel {
  Duration base_latency = micros(500);
  double bandwidth_bps = 1e9;
  // Upper bound of a uniform jitter sample; zero disables jitter.
  Duration jitter = Duration::zero();
};

// base_latency + 8 * bytes / bandwidth (+ a jitter sample when rng is given
// and the model has non-zero jitter).
Duration net_delay(std::size_t bytes, const NetworkModel& link, Rng* jitter_rng = nullptr);

enum class Traffic : std::uint8_t {
  Client,     // submissions, acks, reads
  Consensus,  // proposals, votes, log replication carrying entries
  Heartbeat,  // empty replication messages and their responses
  Gossip,     // transaction propagation between nodes
  Privacy,    // transaction-manager payload transfers
  Event,      // block events and receipts to clients
  Count,
};

std::string_view traffic_name(Traffic t);

// Delivers messages through the scheduler. Links are FIFO per ordered
// (from, to) pair. A message from or to an endpoint marked down is dropped.
class Network {
 public:
  Network(Scheduler& sched, NetworkModel model, Rng jitter_rng);

  void send(ActorId from, ActorId to, std::size_t bytes, Traffic kind, std::function<void()> deliver);
  // Like send, but the message leaves `from` at `depart` >= now.
  void send_at(SimTime depart, ActorId from, ActorId to, std::size_t bytes, Traffic kind,
               std::function<void()> deliver);

  void set_down(ActorId endpoint, bool down);
  bool is_down(ActorId endpoint) const { return down_.contains(endpoint); }

  const NetworkModel& model() const { return model_; }
  std::uint64_t messages(Traffic kind) const { return counts_[static_cast<std::size_t>(kind)]; }
  std::uint64_t bytes(Traffic kind) const { return bytes_[static_cast<std::size_t>(kind)]; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  Scheduler& sched_;
  NetworkModel model_;
  Rng jitter_rng_;
  std::unordered_map<std::uint64_t, SimTime> last_arrival_;
  std::unordered_set<ActorId> down_;
  std::array<std::uint64_t, static_cast<std::size_t>(Traffic::Count)> counts_{};
  std::array<std::uint64_t, static_cast<std::size_t>(Traffic::Count)> bytes_{};
  std::uint64_t dropped_ = 0;
};

}  // namespace permledger::sim
