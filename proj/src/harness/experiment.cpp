#include "permledger/harness/experiment.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <thread>

namespace permledger::harness {

Experiment::Experiment(ExperimentConfig cfg, double rate_per_client, std::string preset)
    : cfg_(std::move(cfg)), rate_(rate_per_client), preset_(std::move(preset)) {
  if (rate_ <= 0) throw std::invalid_argument("send rate must be positive");
  if (cfg_.schedule.clients == 0) throw std::invalid_argument("at least one client is required");
  cfg_.cluster.seed = cfg_.seed;
  if (cfg_.workload.kind == WorkloadKind::Read) cfg_.workload.peer_policy = PeerPolicy::SinglePeer;

  cluster_ = std::make_unique<node::Cluster>(cfg_.cluster);
  const auto visibility = cfg_.privacy ? ledger::Visibility::Private : ledger::Visibility::Public;
  std::optional<std::vector<NodeId>> group;
  if (cfg_.privacy) group = cfg_.privacy->group;
  contract_ = cluster_->deploy_contract(cfg_.workload.initial_entries, visibility, group, cfg_.seed,
                                        cfg_.workload.event_payload_size);

  const auto n = cluster_->size();
  for (std::uint32_t c = 0; c < cfg_.schedule.clients; ++c) {
    NodeId peer = cfg_.workload.peer_policy == PeerPolicy::SinglePeer ? cfg_.workload.single_peer % n : c % n;
    if (cfg_.privacy) peer = cfg_.privacy->group[c % cfg_.privacy->group.size()];
    clients_.push_back(
        std::make_unique<BenchClient>(c, *cluster_, peer, sim::seconds(cfg_.schedule.ack_timeout_s)));
    client_rngs_.push_back(sim::Rng::stream(cfg_.seed, 5000 + c));
  }
  next_seq_.assign(cfg_.schedule.clients, 0);
}

void Experiment::emit(std::uint32_t client, std::uint64_t remaining, sim::Duration gap) {
  if (remaining == 0) return;
  auto& rng = client_rngs_[client];
  auto request = generate_tx(cfg_.workload, contract_, client, next_seq_[client]++, cfg_.seed, rng, cfg_.privacy);
  clients_[client]->send(std::move(request));
  ++emitted_;
  if (remaining == 1) return;
  const auto next = cfg_.schedule.arrival == Arrival::Poisson ? rng.exponential(gap) : gap;
  cluster_->scheduler().schedule(next, sim::client_actor(client),
                                 [this, client, remaining, gap] { emit(client, remaining - 1, gap); });
}

MetricsRecord Experiment::run_round(std::uint32_t round) {
  auto& sched = cluster_->scheduler();
  const auto& s = cfg_.schedule;
  const std::uint64_t total = s.tx_cap / std::max<std::uint32_t>(s.rounds, 1);
  const sim::Duration gap = sim::seconds(1.0 / rate_);

  for (auto& c : clients_) c->begin_round();
  emitted_ = 0;
  const auto start = sched.now();
  sim::SimTime last_send = start;
  for (std::uint32_t c = 0; c < s.clients; ++c) {
    const std::uint64_t count = total / s.clients + (c < total % s.clients ? 1 : 0);
    if (count == 0) continue;
    const auto offset = sim::seconds(static_cast<double>(c) / (rate_ * s.clients));
    last_send = std::max(last_send, start + offset + gap * static_cast<std::int64_t>(count - 1));
    sched.schedule(offset, sim::client_actor(c), [this, c, count, gap] { emit(c, count, gap); });
  }

  if (round == 0) {
    for (auto n : cfg_.faults.crash_nodes) cluster_->crash(n);
    if (cfg_.faults.crash_leader_at_s) {
      sched.schedule(sim::seconds(*cfg_.faults.crash_leader_at_s), sim::kNoActor, [this] {
        if (auto l = cluster_->leader()) cluster_->crash(*l);
      });
    }
  }

  const auto deadline = last_send + sim::seconds(s.drain_timeout_s);
  auto settled = [&] {
    if (emitted_ < total) return false;
    std::uint64_t confirmed = 0;
    for (const auto& c : clients_) confirmed += c->tally().confirmed;
    return confirmed >= total;
  };
  while (!settled()) {
    const auto next = sched.next_fire_time();
    if (!next || *next > deadline) {
      sched.run_until(std::max(deadline, sched.now()));
      break;
    }
    sched.step();
  }

  MetricsRecord r;
  r.preset = preset_;
  r.workload = cfg_.workload_label();
  r.consensus = node::algorithm_name(cfg_.cluster.algorithm);
  r.block_time_ms = cfg_.block_time_ms();
  r.offered_tps = rate_ * s.clients;
  r.seed = cfg_.seed;
  std::vector<double> latencies;
  std::vector<sim::SimTime> times;
  for (auto& c : clients_) {
    auto t = c->end_round();
    r.submitted += t.submitted;
    r.confirmed += t.confirmed;
    latencies.insert(latencies.end(), t.latencies.begin(), t.latencies.end());
    times.insert(times.end(), t.confirm_times.begin(), t.confirm_times.end());
  }
  r.failed = r.submitted - r.confirmed;
  r.throughput_tps = compute_throughput(times);
  if (times.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    r.window_s = sim::to_seconds(*hi - *lo);
  }
  r.latency = latency_stats(std::move(latencies));
  return r;
}

RateResult Experiment::run() {
  auto& sched = cluster_->scheduler();
  cluster_->start();
  sched.run_until(sched.now() + sim::seconds(cfg_.schedule.warmup_s));
  RateResult result;
  result.rate_per_client = rate_;
  for (std::uint32_t round = 0; round < cfg_.schedule.rounds; ++round) {
    if (round > 0) sched.run_until(sched.now() + sim::seconds(cfg_.schedule.round_pause_s));
    result.rounds.push_back(run_round(round));
  }
  result.aggregate = aggregate_rounds(result.rounds);
  result.diagnostics = collect();
  return result;
}

Diagnostics Experiment::collect() const {
  Diagnostics d;
  const auto& net = cluster_->network();
  for (std::size_t i = 0; i < d.messages.size(); ++i) d.messages[i] = net.messages(static_cast<sim::Traffic>(i));
  for (NodeId n = 0; n < cluster_->size(); ++n) {
    const auto& node = cluster_->node(n);
    d.final_height = std::max(d.final_height, node.ledger().height());
    const auto& st = node.engine().stats();
    d.leader_changes += st.leader_changes;
    d.round_changes += st.round_changes;
    d.equivocations += st.equivocations_detected;
  }
  d.chains_consistent = cluster_->chains_consistent();
  for (const auto& c : clients_) {
    d.failovers += c->stats().failovers;
    d.events_received += c->stats().events_received;
    d.events_processed += c->stats().events_processed;
    d.max_queue_depth = std::max(d.max_queue_depth, c->stats().max_queue_depth);
    d.rejected += c->stats().rejected;
  }
  d.trace_digest = cluster_->scheduler().trace_digest();
  d.sim_end_s = sim::to_seconds(cluster_->scheduler().now());
  return d;
}

std::vector<RateResult> run_sweep(const ExperimentConfig& cfg, const std::string& preset, unsigned workers,
                                  const Inspector& inspect) {
  const auto& rates = cfg.schedule.rates;
  if (rates.empty()) throw std::invalid_argument("schedule.rates is empty");
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RateResult> out(rates.size());
  std::size_t next = 0;
  while (next < rates.size()) {
    std::vector<std::future<RateResult>> batch;
    const auto end = std::min(rates.size(), next + workers);
    for (std::size_t i = next; i < end; ++i) {
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                 [&cfg, &preset, &inspect, rate = rates[i]] {
                                   Experiment e(cfg, rate, preset);
                                   auto result = e.run();
                                   if (inspect) inspect(cfg, rate, e);
                                   return result;
                                 }));
    }
    for (std::size_t i = next; i < end; ++i) out[i] = batch[i - next].get();
    next = end;
  }
  return out;
}

}  // namespace permledger::harness
