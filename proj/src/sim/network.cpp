#include "permledger/sim/network.hpp"

#include <algorithm>
#include <cmath>

namespace permledger::sim {

Duration net_delay(std::size_t bytes, const NetworkModel& link, Rng* jitter_rng) {
  const double transfer_ns = 8.0 * static_cast<double>(bytes) / link.bandwidth_bps * 1e9;
  Duration d = link.base_latency + Duration{std::llround(transfer_ns)};
  if (jitter_rng != nullptr && link.jitter > Duration::zero()) {
    d += jitter_rng->uniform(Duration::zero(), link.jitter);
  }
  return d;
}

std::string_view traffic_name(Traffic t) {
  switch (t) {
    case Traffic::Client: return "client";
    case Traffic::Consensus: return "consensus";
    case Traffic::Heartbeat: return "heartbeat";
    case Traffic::Gossip: return "gossip";
    case Traffic::Privacy: return "privacy";
    case Traffic::Event: return "event";
    case Traffic::Count: break;
  }
  return "unknown";
}

Network::Network(Scheduler& sched, NetworkModel model, Rng jitter_rng)
    : sched_(sched), model_(model), jitter_rng_(std::move(jitter_rng)) {}

void Network::send(ActorId from, ActorId to, std::size_t bytes, Traffic kind,
                   std::function<void()> deliver) {
  send_at(sched_.now(), from, to, bytes, kind, std::move(deliver));
}

void Network::send_at(SimTime depart, ActorId from, ActorId to, std::size_t bytes, Traffic kind,
                      std::function<void()> deliver) {
  if (depart > sched_.now()) {
    sched_.schedule_at(depart, from, [this, from, to, bytes, kind, deliver = std::move(deliver)]() mutable {
      send_at(sched_.now(), from, to, bytes, kind, std::move(deliver));
    });
    return;
  }
  if (is_down(from)) {
    ++dropped_;
    return;
  }
  const auto k = static_cast<std::size_t>(kind);
  ++counts_[k];
  bytes_[k] += bytes;

  const std::uint64_t link = (static_cast<std::uint64_t>(from) << 32) | to;
  SimTime arrival = sched_.now() + net_delay(bytes, model_, &jitter_rng_);
  auto [it, inserted] = last_arrival_.try_emplace(link, arrival);
  if (!inserted) {
    arrival = std::max(arrival, it->second);
    it->second = arrival;
  }
  sched_.schedule_at(arrival, to, [this, to, deliver = std::move(deliver)] {
    if (is_down(to)) {
      ++dropped_;
      return;
    }
    deliver();
  });
}

void Network::set_down(ActorId endpoint, bool down) {
  if (down) {
    down_.insert(endpoint);
  } else {
    down_.erase(endpoint);
  }
}

}  // namespace permledger::sim
