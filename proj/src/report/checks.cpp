#include "permledger/report/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace permledger::report {

using harness::MetricsRecord;

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double avg_latency(const MetricsRecord& r) { return r.latency ? r.latency->avg : NAN; }

const MetricsRecord* find_workload(const PresetRun& run, const std::string& label) {
  for (const auto& r : run.report.records) {
    if (r.workload == label) return &r;
  }
  return nullptr;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<CheckResult> check_metric_identities(const PresetRun& run) {
  CheckResult counts{"submitted = confirmed + failed", true, ""};
  CheckResult window{"throughput x window = confirmed", true, ""};
  std::size_t rounds = 0;
  for (const auto& sweep : run.sweeps) {
    for (const auto& rate : sweep) {
      for (const auto& r : rate.rounds) {
        ++rounds;
        if (r.submitted != r.confirmed + r.failed) {
          counts.passed = false;
          counts.detail = fmt("round with submitted %.0f, confirmed %.0f, failed %.0f", double(r.submitted),
                              double(r.confirmed), double(r.failed));
        }
        if (r.throughput_tps && r.window_s) {
          const double product = *r.throughput_tps * *r.window_s;
          if (std::abs(product - double(r.confirmed)) > 1e-6 * std::max(1.0, double(r.confirmed))) {
            window.passed = false;
            window.detail = fmt("throughput x window %.6f vs confirmed %.0f", product, double(r.confirmed));
          }
        }
      }
    }
  }
  if (counts.passed) counts.detail = std::to_string(rounds) + " rounds";
  if (window.passed) window.detail = std::to_string(rounds) + " rounds";
  return {counts, window};
}

std::vector<CheckResult> check_table1(const PresetRun& run) {
  std::map<double, const MetricsRecord*> by_bt;
  for (const auto& r : run.report.records) by_bt[r.block_time_ms] = &r;
  std::vector<CheckResult> out;
  double lo = INFINITY, hi = 0;
  for (const auto& [bt, r] : by_bt) {
    const double t = r->throughput_tps.value_or(0);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  const double spread = hi > 0 ? (hi - lo) / hi : 1.0;
  out.push_back({"throughput varies < 5% across block times", spread < 0.05,
                 fmt("min %.1f, max %.1f tx/s, spread %.2f%%", lo, hi, spread * 100)});
  if (by_bt.contains(100) && by_bt.contains(1000)) {
    const double l100 = avg_latency(*by_bt[100]), l1000 = avg_latency(*by_bt[1000]);
    const double ratio = l1000 / l100;
    out.push_back({"latency(BT=1000) >= 2.0 x latency(BT=100)", ratio >= 2.0,
                   fmt("%.3f s / %.3f s = %.2fx", l1000, l100, ratio)});
  } else {
    out.push_back({"latency(BT=1000) >= 2.0 x latency(BT=100)", false, "missing block time rows"});
  }
  return out;
}

std::vector<CheckResult> check_workloads(const PresetRun& run) {
  const auto* w = find_workload(run, "write");
  const auto* n = find_workload(run, "null");
  const auto* r = find_workload(run, "read");
  const auto* m = find_workload(run, "mix50");
  if (!w || !n || !r || !m) return {{"workload rows present", false, "write, null, read and mix50 are required"}};
  const double wa = avg_latency(*w), na = avg_latency(*n), ra = avg_latency(*r), ma = avg_latency(*m);
  return {{"read < mix50 < write latency", ra < ma && ma < wa, fmt("read %.4f, mix50 %.4f, write %.4f s", ra, ma, wa)},
          {"|write - null| <= 10% of write", std::abs(wa - na) <= 0.1 * wa,
           fmt("write %.4f, null %.4f s (%.2f%%)", wa, na, 100 * std::abs(wa - na) / wa)}};
}

std::vector<CheckResult> check_raft_vs_ibft(const PresetRun& run) {
  std::map<double, const MetricsRecord*> raft, ibft;
  for (const auto& r : run.report.records) (r.consensus == "raft" ? raft : ibft)[r.offered_tps.value_or(0)] = &r;
  double one_way = 0;
  if (!run.report.configs.empty()) {
    one_way = run.report.configs.front()["network"]["base_latency_ms"].get<double>() / 1000.0;
  }
  CheckResult c{"IBFT latency > RAFT latency + 2 one-way delays", !raft.empty(), ""};
  for (const auto& [rate, r] : raft) {
    auto it = ibft.find(rate);
    if (it == ibft.end()) {
      c.passed = false;
      c.detail += fmt("no IBFT row at %.0f tx/s; ", rate);
      continue;
    }
    const double lr = avg_latency(*r), li = avg_latency(*it->second);
    if (!(li > lr + 2 * one_way)) c.passed = false;
    c.detail += fmt("%.0f tx/s: ibft/raft %.2fx; ", rate, li / lr);
  }
  return {c};
}

std::vector<CheckResult> check_private_vs_public(const PresetRun& run) {
  std::map<double, const MetricsRecord*> pub, priv;
  for (const auto& r : run.report.records) {
    const bool is_private = r.workload.size() > 8 && r.workload.ends_with("-private");
    (is_private ? priv : pub)[r.offered_tps.value_or(0)] = &r;
  }
  CheckResult within{"private throughput within 10% of public at <= 600 tx/s", true, ""};
  CheckResult below{"private throughput below public above 600 tx/s", true, ""};
  bool any_high = false;
  for (const auto& [rate, p] : pub) {
    auto it = priv.find(rate);
    if (it == priv.end()) {
      within.passed = false;
      within.detail += fmt("no private row at %.0f tx/s; ", rate);
      continue;
    }
    const double tp = p->throughput_tps.value_or(0), tq = it->second->throughput_tps.value_or(0);
    if (rate <= 600) {
      if (std::abs(tq - tp) > 0.1 * tp) within.passed = false;
      within.detail += fmt("%.0f: %.1f vs %.1f; ", rate, tq, tp);
    } else {
      any_high = true;
      if (!(tq < tp)) below.passed = false;
      below.detail += fmt("%.0f: %.1f vs %.1f; ", rate, tq, tp);
    }
  }
  if (!any_high) {
    below.passed = false;
    below.detail = "no rate above 600 tx/s";
  }
  return {within, below};
}

std::vector<CheckResult> check_microbench(const PresetRun& run, const microbench::MicrobenchConfig& cfg) {
  std::vector<CheckResult> out;
  std::vector<const microbench::MicrobenchResult*> reads, writes, kv_read, kv_write, tx_pay, ev_pay;
  for (const auto& r : run.micro) {
    if (r.suite == "rwset") {
      if (r.writes == 0) reads.push_back(&r);
      if (r.reads == 0) writes.push_back(&r);
    } else if (r.suite == "kvsize") {
      (r.writes ? kv_write : kv_read).push_back(&r);
    } else if (r.suite == "payload") {
      // The suite runs the tx sweep first, then the event sweep.
      (tx_pay.size() < cfg.payload_sizes.size() ? tx_pay : ev_pay).push_back(&r);
    }
  }
  auto by = [](auto key) {
    return [key](const microbench::MicrobenchResult* a, const microbench::MicrobenchResult* b) {
      return key(*a) < key(*b);
    };
  };
  auto increasing = [](const std::vector<const microbench::MicrobenchResult*>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!v[i]->ok || !(v[i]->mean_latency_s > v[i - 1]->mean_latency_s)) return false;
    }
    return v.size() >= 2;
  };
  std::sort(reads.begin(), reads.end(), by([](const auto& r) { return r.reads; }));
  std::sort(writes.begin(), writes.end(), by([](const auto& r) { return r.writes; }));
  if (!reads.empty() || !writes.empty()) {
    out.push_back({"rwset latency strictly increasing in reads", increasing(reads), std::to_string(reads.size()) + " points"});
    out.push_back({"rwset latency strictly increasing in writes", increasing(writes), std::to_string(writes.size()) + " points"});
    CheckResult exact{"rwset latency difference = c_write x extra writes", true, ""};
    const double c_write = sim::to_seconds(cfg.costs.per_write);
    for (std::size_t i = 1; i < writes.size(); ++i) {
      if (!writes[i]->ok || !writes[i - 1]->ok) continue;
      const double diff = writes[i]->mean_latency_s - writes[i - 1]->mean_latency_s;
      const double want = c_write * double(writes[i]->writes - writes[i - 1]->writes);
      if (std::abs(diff - want) > 1e-9) {
        exact.passed = false;
        exact.detail += fmt("%.0f writes: %.9f vs %.9f; ", double(writes[i]->writes), diff, want);
      }
    }
    if (exact.passed) exact.detail = std::to_string(writes.size() ? writes.size() - 1 : 0) + " steps, exact to 1 ns";
    out.push_back(exact);
  }
  if (!kv_read.empty()) {
    auto identical = [](const std::vector<const microbench::MicrobenchResult*>& v) {
      for (const auto* r : v) {
        if (r->latencies_s != v.front()->latencies_s) return false;
      }
      return true;
    };
    out.push_back({"kvsize simulated latency independent of store size", identical(kv_read) && identical(kv_write),
                   std::to_string(kv_read.size()) + " sizes"});
    auto ratio = [](std::vector<const microbench::MicrobenchResult*> v) {
      std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->store_size < b->store_size; });
      return v.back()->wall_ns.value_or(0) / std::max(1e-9, v.front()->wall_ns.value_or(0));
    };
    const double rr = ratio(kv_read), wr = ratio(kv_write);
    out.push_back({"kvsize wall time ratio largest/smallest store <= 3", rr <= 3 && wr <= 3,
                   fmt("read %.2fx, write %.2fx", rr, wr)});
  }
  if (!tx_pay.empty()) {
    for (auto [name, v, key] : {std::tuple{"tx", &tx_pay, true}, std::tuple{"event", &ev_pay, false}}) {
      std::sort(v->begin(), v->end(),
                [key](auto* a, auto* b) { return key ? a->tx_payload < b->tx_payload : a->event_payload < b->event_payload; });
      const bool inc = increasing(*v);
      out.push_back({std::string(name) + " payload latency strictly increasing", inc, std::to_string(v->size()) + " points"});
      const double rel = v->size() >= 2 ? v->back()->mean_latency_s / v->front()->mean_latency_s - 1 : 0;
      out.push_back({std::string(name) + " payload increase smallest->largest in [15%, 35%]", rel >= 0.15 && rel <= 0.35,
                     fmt("%.2f%%", rel * 100)});
    }
  }
  return out;
}

std::vector<CheckResult> check_preset(const std::string& name, const PresetRun& run) {
  std::vector<CheckResult> out;
  if (!run.sweeps.empty()) out = check_metric_identities(run);
  std::vector<CheckResult> extra;
  if (name == "table1") extra = check_table1(run);
  else if (name == "workloads") extra = check_workloads(run);
  else if (name == "raft-vs-ibft") extra = check_raft_vs_ibft(run);
  else if (name == "private-vs-public") extra = check_private_vs_public(run);
  else if (name == "microbench-all") extra = check_microbench(run, microbench::MicrobenchConfig{});
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace permledger::report
