#include "permledger/sim/kernel.hpp"

#include <algorithm>
#include <stdexcept>

namespace permledger::sim {

namespace {

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

EventId Scheduler::schedule(Duration delay, ActorId target, std::function<void()> action) {
  if (delay < Duration::zero()) throw std::invalid_argument("Scheduler::schedule: negative delay");
  return schedule_at(now_ + delay, target, std::move(action));
}

EventId Scheduler::schedule_at(SimTime when, ActorId target, std::function<void()> action) {
  if (when < now_) throw std::invalid_argument("Scheduler::schedule_at: time precedes clock");
  const EventId id = next_seq_++;
  heap_.push_back(SimEvent{when, id, target, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return id;
}

bool Scheduler::cancel(EventId id) {
  if (id >= next_seq_ || cancelled_.contains(id)) return false;
  const bool queued = std::any_of(heap_.begin(), heap_.end(),
                                  [id](const SimEvent& e) { return e.seq == id; });
  if (!queued) return false;
  cancelled_.insert(id);
  return true;
}

SimEvent Scheduler::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  SimEvent ev = std::move(heap_.back());
  heap_.pop_back();
  return ev;
}

void Scheduler::dispatch(SimEvent ev) {
  now_ = ev.fire_time;
  ++dispatched_;
  fnv_mix(digest_, static_cast<std::uint64_t>(ev.fire_time.time_since_epoch().count()));
  fnv_mix(digest_, ev.seq);
  fnv_mix(digest_, ev.target);
  ev.action();
}

std::optional<SimTime> Scheduler::next_fire_time() const {
  // Cancelled entries may sit on top; that only makes this a lower bound.
  if (heap_.empty()) return std::nullopt;
  return heap_.front().fire_time;
}

bool Scheduler::step() {
  while (!heap_.empty()) {
    SimEvent ev = pop();
    if (cancelled_.erase(ev.seq) > 0) {
      ++cancelled_count_;
      continue;
    }
    dispatch(std::move(ev));
    return true;
  }
  return false;
}

SimTime Scheduler::run_until(SimTime t_end) {
  if (t_end < now_) throw std::invalid_argument("Scheduler::run_until: t_end precedes clock");
  while (!heap_.empty() && heap_.front().fire_time <= t_end) {
    SimEvent ev = pop();
    if (cancelled_.erase(ev.seq) > 0) {
      ++cancelled_count_;
      continue;
    }
    dispatch(std::move(ev));
  }
  now_ = t_end;
  return now_;
}

}  // namespace permledger::sim
