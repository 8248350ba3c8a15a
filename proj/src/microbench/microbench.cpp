#include "permledger/microbench/microbench.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>

#include "permledger/harness/workload.hpp"
#include "permledger/ledger/contract.hpp"
#include "permledger/node/cluster.hpp"

namespace permledger::microbench {

namespace {

constexpr ledger::ClientId kClient = 0;
const sim::Duration kRequestLimit = sim::seconds(600);

// Single client, single-node RAFT chain, one request in flight.
class SerialBench final : public node::ClientSink {
 public:
  SerialBench(const MicrobenchConfig& cfg, std::uint64_t store_size, std::size_t event_payload) : cfg_(cfg) {
    node::ClusterConfig cc;
    cc.algorithm = node::Algorithm::Raft;
    cc.raft.voters = 1;
    cc.raft.f = 0;
    cc.raft.block_time = sim::millis(cfg.block_time_ms);
    cc.costs = cfg.costs;
    cc.network = cfg.network;
    cc.seed = cfg.seed;
    cluster_ = std::make_unique<node::Cluster>(cc);
    contract_ = cluster_->deploy_contract(store_size, ledger::Visibility::Public, std::nullopt, cfg.seed,
                                          event_payload);
    cluster_->register_client(kClient, this);
    cluster_->subscribe(kClient, 0);
    cluster_->start();
  }

  // Sends on the leader's block-timer phase so every request waits the same
  // time for its block; differences in latency are then due to the request.
  std::optional<double> write(ledger::Call call) {
    align();
    ledger::Transaction tx;
    tx.id = harness::make_tx_id(kClient, seq_++, cfg_.seed);
    tx.sender = kClient;
    tx.contract = contract_;
    tx.call = std::move(call);
    current_ = tx.id;
    cluster_->submit(kClient, 0, std::move(tx));
    return wait();
  }

  std::optional<double> read(std::string key) {
    align();
    current_read_ = next_read_++;
    cluster_->read(kClient, 0, *current_read_, contract_, std::move(key));
    return wait();
  }

  void on_ack(const ledger::TxId& tx, ledger::SubmitError error) override {
    if (current_ && tx == *current_ && error != ledger::SubmitError::None) failed_ = true;
  }

  void on_block_event(const std::shared_ptr<const ledger::BlockEvent>& event) override {
    if (!current_) return;
    for (const auto& c : event->per_tx) {
      if (c.tx_id == *current_) done_at_ = cluster_->scheduler().now();
    }
  }

  void on_read_response(std::uint64_t request_id, const ledger::ReadResult&) override {
    if (current_read_ && request_id == *current_read_) done_at_ = cluster_->scheduler().now();
  }

 private:
  void align() {
    auto& sched = cluster_->scheduler();
    const auto bt = sim::millis(cfg_.block_time_ms).count();
    const auto now = sched.now().time_since_epoch().count();
    const auto next = (now / bt + 1) * bt;
    sched.run_until(sim::SimTime{sim::Duration{next}});
    sent_ = sched.now();
    done_at_.reset();
    failed_ = false;
  }

  std::optional<double> wait() {
    auto& sched = cluster_->scheduler();
    const auto limit = sent_ + kRequestLimit;
    while (!done_at_ && !failed_ && sched.now() <= limit) {
      if (!sched.step()) break;
    }
    current_.reset();
    current_read_.reset();
    if (!done_at_) return std::nullopt;
    return harness::tx_latency(sent_, *done_at_);
  }

  const MicrobenchConfig& cfg_;
  std::unique_ptr<node::Cluster> cluster_;
  ledger::ContractAddress contract_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t next_read_ = 0;
  std::optional<ledger::TxId> current_;
  std::optional<std::uint64_t> current_read_;
  sim::SimTime sent_{};
  std::optional<sim::SimTime> done_at_;
  bool failed_ = false;
};

using WallClock = std::chrono::steady_clock;

double elapsed_ns(WallClock::time_point since) {
  return std::chrono::duration<double, std::nano>(WallClock::now() - since).count();
}

void finish(MicrobenchResult& r) {
  if (r.latencies_s.empty()) return;
  r.mean_latency_s =
      std::accumulate(r.latencies_s.begin(), r.latencies_s.end(), 0.0) / static_cast<double>(r.latencies_s.size());
}

}  // namespace

MicrobenchResult bench_rwset(const MicrobenchConfig& cfg, std::uint64_t reads, std::uint64_t writes) {
  MicrobenchResult r;
  r.suite = "rwset";
  r.label = "rwset/reads=" + std::to_string(reads) + "/writes=" + std::to_string(writes);
  r.reads = reads;
  r.writes = writes;
  r.store_size = std::max({cfg.base_store_size, reads, writes});
  if (writes > cfg.max_writes_per_tx) {
    r.ok = false;
    r.error = "write set of " + std::to_string(writes) + " exceeds the per-transaction limit of " +
              std::to_string(cfg.max_writes_per_tx);
    return r;
  }
  ledger::Call call;
  call.method = ledger::Method::ReadWriteSet;
  call.reads = reads;
  call.writes = writes;

  SerialBench bench(cfg, r.store_size, 0);
  for (std::uint32_t i = 0; i < cfg.repetitions; ++i) {
    auto lat = bench.write(call);
    if (!lat) {
      r.ok = false;
      r.error = "transaction not confirmed";
      break;
    }
    r.latencies_s.push_back(*lat);
  }
  finish(r);

  ledger::ContractState store(1, ledger::Visibility::Public, std::nullopt, 0);
  store.preload(r.store_size, cfg.seed);
  const auto t0 = WallClock::now();
  for (std::uint32_t i = 0; i < cfg.repetitions; ++i) store.execute(call);
  r.wall_ns = elapsed_ns(t0) / std::max<std::uint32_t>(cfg.repetitions, 1);
  return r;
}

std::pair<MicrobenchResult, MicrobenchResult> bench_kvsize(const MicrobenchConfig& cfg, std::uint64_t store_size,
                                                           std::uint64_t ops) {
  MicrobenchResult rd;
  rd.suite = "kvsize";
  rd.label = "kvsize-read/entries=" + std::to_string(store_size);
  rd.store_size = store_size;
  rd.reads = 1;
  MicrobenchResult wr = rd;
  wr.label = "kvsize-write/entries=" + std::to_string(store_size);
  wr.reads = 0;
  wr.writes = 1;
  if (ops == 0 || store_size == 0) return {rd, wr};

  sim::Rng rng = sim::Rng::stream(cfg.seed, 7000 + store_size);
  SerialBench bench(cfg, store_size, 0);
  for (std::uint64_t i = 0; i < ops; ++i) {
    if (auto lat = bench.read(ledger::preload_key(rng.below(store_size)))) rd.latencies_s.push_back(*lat);
    ledger::Call call;
    call.method = ledger::Method::Write;
    call.key = ledger::preload_key(rng.below(store_size));
    call.value = ledger::preload_value(rng.next(), i);
    if (auto lat = bench.write(std::move(call))) wr.latencies_s.push_back(*lat);
  }
  finish(rd);
  finish(wr);

  // Real cost of the state operations, keys spread over the whole store.
  ledger::ContractState store(1, ledger::Visibility::Public, std::nullopt, 0);
  store.preload(store_size, cfg.seed);
  const auto n = std::max<std::uint64_t>(cfg.kv_wall_ops, 1);
  std::vector<ledger::Call> calls(n);
  for (auto& c : calls) {
    c.method = ledger::Method::Write;
    c.key = ledger::preload_key(rng.below(store_size));
    c.value = ledger::preload_value(rng.next(), 0);
  }
  std::size_t sink = 0;
  auto t0 = WallClock::now();
  for (const auto& c : calls) sink += store.get(c.key).size();
  rd.wall_ns = elapsed_ns(t0) / static_cast<double>(n);
  t0 = WallClock::now();
  for (const auto& c : calls) store.execute(c);
  wr.wall_ns = elapsed_ns(t0) / static_cast<double>(n);
  if (sink == 0) rd.error = "no values read";
  return {rd, wr};
}

MicrobenchResult bench_payload(const MicrobenchConfig& cfg, std::size_t tx_payload, std::size_t event_payload) {
  MicrobenchResult r;
  r.suite = "payload";
  r.label = "payload/tx=" + std::to_string(tx_payload) + "/event=" + std::to_string(event_payload);
  r.tx_payload = tx_payload;
  r.event_payload = event_payload;
  r.store_size = cfg.base_store_size;
  if (event_payload > ledger::kMaxPayloadBytes) {
    r.ok = false;
    r.error = "event payload exceeds 32768 bytes";
    finish(r);
    return r;
  }
  SerialBench bench(cfg, r.store_size, event_payload);
  sim::Rng rng = sim::Rng::stream(cfg.seed, 9000 + tx_payload);
  for (std::uint32_t i = 0; i < cfg.repetitions; ++i) {
    ledger::Call call;
    call.method = ledger::Method::Write;
    call.key = ledger::preload_key(rng.below(r.store_size));
    call.value = ledger::preload_value(rng.next(), i);
    call.payload.resize(tx_payload);
    rng.fill(call.payload);
    auto lat = bench.write(std::move(call));
    if (!lat) {
      r.ok = false;
      r.error = tx_payload > ledger::kMaxPayloadBytes ? "payload exceeds 32768 bytes" : "transaction not confirmed";
      break;
    }
    r.latencies_s.push_back(*lat);
  }
  finish(r);
  return r;
}

std::vector<MicrobenchResult> run_rwset_suite(const MicrobenchConfig& cfg) {
  std::vector<MicrobenchResult> out;
  out.push_back(bench_rwset(cfg, 0, 0));
  for (auto k : cfg.rwset_sizes) out.push_back(bench_rwset(cfg, k, 0));
  for (auto k : cfg.rwset_sizes) out.push_back(bench_rwset(cfg, 0, k));
  return out;
}

std::vector<MicrobenchResult> run_kvsize_suite(const MicrobenchConfig& cfg) {
  std::vector<MicrobenchResult> out;
  for (auto size : cfg.kv_store_sizes) {
    auto [rd, wr] = bench_kvsize(cfg, size, cfg.kv_sim_ops);
    out.push_back(std::move(rd));
    out.push_back(std::move(wr));
  }
  return out;
}

std::vector<MicrobenchResult> run_payload_suite(const MicrobenchConfig& cfg) {
  std::vector<MicrobenchResult> out;
  for (auto p : cfg.payload_sizes) out.push_back(bench_payload(cfg, p, cfg.fixed_payload));
  for (auto p : cfg.payload_sizes) out.push_back(bench_payload(cfg, cfg.fixed_payload, p));
  return out;
}

harness::MetricsRecord to_record(const MicrobenchResult& r, const MicrobenchConfig& cfg, const std::string& preset) {
  harness::MetricsRecord m;
  m.preset = preset;
  m.workload = r.label;
  m.consensus = "raft";
  m.block_time_ms = cfg.block_time_ms;
  m.seed = cfg.seed;
  m.submitted = r.suite == "kvsize" ? cfg.kv_sim_ops : cfg.repetitions;
  m.confirmed = r.latencies_s.size();
  m.failed = m.submitted >= m.confirmed ? m.submitted - m.confirmed : 0;
  m.latency = harness::latency_stats(r.latencies_s);
  return m;
}

}  // namespace permledger::microbench
