#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_set>
#include <vector>

#include "permledger/sim/time.hpp"

namespace permledger::sim {

using EventId = std::uint64_t;

// Identifies the actor an event is addressed to. Nodes use their node id;
// clients are offset by kClientActorBase. Only used for tracing.
using ActorId = std::uint32_t;
inline constexpr ActorId kClientActorBase = 1u << 20;
inline constexpr ActorId kNoActor = ~ActorId{0};

constexpr ActorId node_actor(std::uint32_t node) { return node; }
constexpr ActorId client_actor(std::uint32_t client) { return kClientActorBase + client; }
constexpr bool is_client_actor(ActorId a) { return a != kNoActor && a >= kClientActorBase; }

struct SimEvent {
  SimTime fire_time;
  EventId seq = 0;
  ActorId target = kNoActor;
  std::function<void()> action;
};

// Single-threaded discrete-event scheduler.
//
// Events fire in (fire_time, seq) order where seq is the insertion counter,
// so simultaneous events are delivered in the order they were scheduled.
// Handlers may schedule further events, including at the current instant.
class Scheduler {
 public:
  Scheduler() = default;
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  // Throws std::invalid_argument on a negative delay.
  EventId schedule(Duration delay, ActorId target, std::function<void()> action);
  // Throws std::invalid_argument if `when` precedes now().
  EventId schedule_at(SimTime when, ActorId target, std::function<void()> action);

  // Returns false if the event already fired, was cancelled, or is unknown.
  bool cancel(EventId id);

  // Dispatches every event with fire_time <= t_end, then sets the clock to
  // t_end. Throws std::invalid_argument if t_end < now().
  SimTime run_until(SimTime t_end);

  // Dispatches the next event, if any. Returns false when the queue is empty.
  bool step();

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size() - cancelled_.size(); }
  std::uint64_t scheduled() const { return next_seq_; }
  std::uint64_t dispatched() const { return dispatched_; }
  std::uint64_t cancelled() const { return cancelled_count_; }
  std::optional<SimTime> next_fire_time() const;

  // Running FNV-1a digest over (fire_time, seq, target) of every dispatched
  // event. Two runs with equal digests executed the same event trace.
  std::uint64_t trace_digest() const { return digest_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.seq > b.seq;
    }
  };

  SimEvent pop();
  void dispatch(SimEvent ev);

  std::vector<SimEvent> heap_;
  std::unordered_set<EventId> cancelled_;
  SimTime now_{};
  EventId next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t cancelled_count_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
};

}  // namespace permledger::sim
