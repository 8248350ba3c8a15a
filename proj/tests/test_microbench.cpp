#include <doctest.h>

#include <cmath>

#include "permledger/microbench/microbench.hpp"

using namespace permledger;
using namespace permledger::microbench;

namespace {

MicrobenchConfig quick() {
  MicrobenchConfig cfg;
  cfg.repetitions = 2;
  cfg.kv_wall_ops = 2000;
  cfg.kv_sim_ops = 5;
  return cfg;
}

std::int64_t ns(double s) { return std::llround(s * 1e9); }

}  // namespace

TEST_SUITE("microbench") {
  TEST_CASE("rwset: null baseline and monotonic growth") {
    const auto cfg = quick();
    const auto base = bench_rwset(cfg, 0, 0);
    REQUIRE(base.ok);
    CHECK(base.latencies_s.size() == cfg.repetitions);
    double prev_r = base.mean_latency_s, prev_w = base.mean_latency_s;
    for (std::uint64_t k : {1, 10, 100, 1000, 10000}) {
      const auto r = bench_rwset(cfg, k, 0);
      const auto w = bench_rwset(cfg, 0, k);
      CHECK(r.mean_latency_s > prev_r);
      CHECK(w.mean_latency_s > prev_w);
      CHECK(w.mean_latency_s > r.mean_latency_s);
      prev_r = r.mean_latency_s;
      prev_w = w.mean_latency_s;
    }
  }

  TEST_CASE("rwset: cost-model linearity is exact") {
    const auto cfg = quick();
    for (std::uint64_t k : {1, 50, 1000}) {
      const auto w1 = bench_rwset(cfg, 0, k), w2 = bench_rwset(cfg, 0, 2 * k);
      CHECK(ns(w2.mean_latency_s) - ns(w1.mean_latency_s) == (cfg.costs.per_write * k).count());
      const auto r1 = bench_rwset(cfg, k, 0), r2 = bench_rwset(cfg, 2 * k, 0);
      CHECK(ns(r2.mean_latency_s) - ns(r1.mean_latency_s) == (cfg.costs.per_read * k).count());
    }
  }

  TEST_CASE("rwset: write guard refuses oversized write sets") {
    auto cfg = quick();
    cfg.max_writes_per_tx = 100;
    CHECK(bench_rwset(cfg, 0, 100).ok);
    const auto r = bench_rwset(cfg, 0, 101);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.error.empty());
    CHECK(r.latencies_s.empty());
  }

  TEST_CASE("kvsize: simulated latency ignores store size") {
    const auto cfg = quick();
    const auto [r_small, w_small] = bench_kvsize(cfg, 1000, 5);
    const auto [r_big, w_big] = bench_kvsize(cfg, 100000, 5);
    CHECK(r_small.mean_latency_s == r_big.mean_latency_s);
    CHECK(w_small.mean_latency_s == w_big.mean_latency_s);
    CHECK(r_small.mean_latency_s < w_small.mean_latency_s);
    CHECK(r_small.wall_ns.has_value());
  }

  TEST_CASE("kvsize: zero ops yields no samples") {
    const auto [r, w] = bench_kvsize(quick(), 1000, 0);
    CHECK(r.latencies_s.empty());
    CHECK(w.latencies_s.empty());
    CHECK(r.mean_latency_s == 0);
    CHECK(std::isfinite(w.mean_latency_s));
  }

  TEST_CASE("payload: monotonic, bounded, rejected above 32 KB") {
    const auto cfg = quick();
    double prev_tx = bench_payload(cfg, 0, cfg.fixed_payload).mean_latency_s;
    double prev_ev = bench_payload(cfg, cfg.fixed_payload, 0).mean_latency_s;
    for (std::size_t b : cfg.payload_sizes) {
      const double tx = bench_payload(cfg, b, cfg.fixed_payload).mean_latency_s;
      const double ev = bench_payload(cfg, cfg.fixed_payload, b).mean_latency_s;
      CHECK(tx > prev_tx);
      CHECK(ev > prev_ev);
      prev_tx = tx;
      prev_ev = ev;
    }
    CHECK(bench_payload(cfg, 32768, cfg.fixed_payload).ok);
    const auto big = bench_payload(cfg, 32769, cfg.fixed_payload);
    CHECK_FALSE(big.ok);
    CHECK_FALSE(bench_payload(cfg, cfg.fixed_payload, 32769).ok);
  }

  TEST_CASE("payload: 1 KB to 30 KB rises 15-35%") {
    const auto cfg = quick();
    const double tx1 = bench_payload(cfg, 1024, 1024).mean_latency_s;
    const double tx30 = bench_payload(cfg, 30720, 1024).mean_latency_s;
    const double ev30 = bench_payload(cfg, 1024, 30720).mean_latency_s;
    const double tx_rise = tx30 / tx1 - 1, ev_rise = ev30 / tx1 - 1;
    CHECK(tx_rise >= 0.15);
    CHECK(tx_rise <= 0.35);
    CHECK(ev_rise >= 0.15);
    CHECK(ev_rise <= 0.35);
  }

  TEST_CASE("to_record maps suite rows") {
    const auto cfg = quick();
    const auto r = bench_rwset(cfg, 10, 0);
    const auto rec = to_record(r, cfg, "microbench-rwset");
    CHECK(rec.preset == "microbench-rwset");
    CHECK(rec.consensus == "raft");
    CHECK(rec.block_time_ms == 1.0);
    CHECK(rec.confirmed == cfg.repetitions);
    CHECK(rec.failed == 0);
    REQUIRE(rec.latency);
    CHECK(rec.latency->avg == doctest::Approx(r.mean_latency_s));
  }
}
