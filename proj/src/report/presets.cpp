#include "permledger/report/presets.hpp"

#include <algorithm>
#include <stdexcept>

#include "permledger/report/config_io.hpp"

namespace permledger::report {

using harness::ExperimentConfig;
using harness::WorkloadKind;

namespace {

ExperimentConfig base(const std::string& name, std::uint64_t seed, node::Algorithm algo, double bt_ms) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.seed = seed;
  cfg.cluster = harness::default_cluster(algo, bt_ms);
  cfg.cluster.seed = seed;
  return cfg;
}

std::vector<ExperimentConfig> table1(std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (double bt : {50.0, 100.0, 250.0, 500.0, 1000.0}) {
    auto cfg = base("table1", seed, node::Algorithm::Raft, bt);
    cfg.schedule.rates = {250};  // 3 clients, 750 tx/s offered
    out.push_back(cfg);
  }
  return out;
}

std::vector<ExperimentConfig> workloads(std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (auto kind : {WorkloadKind::Write, WorkloadKind::Null, WorkloadKind::Read, WorkloadKind::Mix50}) {
    auto cfg = base("workloads", seed, node::Algorithm::Raft, 100);
    cfg.workload.kind = kind;
    if (kind == WorkloadKind::Read) cfg.workload.peer_policy = harness::PeerPolicy::SinglePeer;
    cfg.schedule.rates = {100};
    out.push_back(cfg);
  }
  return out;
}

std::vector<ExperimentConfig> raft_vs_ibft(std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (auto algo : {node::Algorithm::Raft, node::Algorithm::Ibft}) {
    auto cfg = base("raft-vs-ibft", seed, algo, 1000);
    cfg.schedule.rates = {50, 150, 250, 350, 450, 550};
    out.push_back(cfg);
  }
  return out;
}

std::vector<ExperimentConfig> private_vs_public(std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (bool priv : {false, true}) {
    auto cfg = base("private-vs-public", seed, node::Algorithm::Raft, 100);
    cfg.cluster.raft.learners = 1;
    cfg.schedule.clients = 2;
    cfg.schedule.rates = {150, 300, 450};
    if (priv) cfg.privacy = harness::PrivacySpec{{0, 1}};
    out.push_back(cfg);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"table1", "workloads", "raft-vs-ibft", "private-vs-public",
                                                 "microbench-all"};
  return names;
}

bool is_preset(const std::string& name) {
  const auto& n = preset_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<ExperimentConfig> preset_configs(const std::string& name, std::uint64_t seed) {
  if (name == "table1") return table1(seed);
  if (name == "workloads") return workloads(seed);
  if (name == "raft-vs-ibft") return raft_vs_ibft(seed);
  if (name == "private-vs-public") return private_vs_public(seed);
  if (name == "microbench-all") return {};
  throw std::invalid_argument("unknown preset '" + name + "'");
}

PresetRun run_configs(const std::string& preset, std::uint64_t seed, const std::vector<ExperimentConfig>& configs,
                      unsigned workers, const harness::Inspector& inspect) {
  PresetRun run;
  run.report.preset = preset;
  run.report.seed = seed;
  for (const auto& cfg : configs) {
    auto errors = validate_config(cfg);
    if (!errors.empty()) throw errors.front();
    run.report.configs.push_back(config_to_json(cfg));
    auto sweep = harness::run_sweep(cfg, preset, workers, inspect);
    for (const auto& r : sweep) run.report.records.push_back(r.aggregate);
    run.sweeps.push_back(std::move(sweep));
  }
  return run;
}

PresetRun run_preset(const std::string& name, std::uint64_t seed, unsigned workers,
                     const harness::Inspector& inspect) {
  if (name == "microbench-all") {
    microbench::MicrobenchConfig cfg;
    cfg.seed = seed;
    auto run = run_microbench("all", cfg);
    run.report.preset = name;
    for (auto& r : run.report.records) r.preset = name;
    return run;
  }
  return run_configs(name, seed, preset_configs(name, seed), workers, inspect);
}

bool is_microbench_suite(const std::string& suite) {
  return suite == "rwset" || suite == "kvsize" || suite == "payload" || suite == "all";
}

PresetRun run_microbench(const std::string& suite, const microbench::MicrobenchConfig& cfg) {
  if (!is_microbench_suite(suite)) throw std::invalid_argument("unknown microbench suite '" + suite + "'");
  PresetRun run;
  const std::string preset = "microbench-" + suite;
  run.report.preset = preset;
  run.report.seed = cfg.seed;
  auto append = [&](std::vector<microbench::MicrobenchResult> rs) {
    for (auto& r : rs) run.micro.push_back(std::move(r));
  };
  if (suite == "rwset" || suite == "all") append(microbench::run_rwset_suite(cfg));
  if (suite == "kvsize" || suite == "all") append(microbench::run_kvsize_suite(cfg));
  if (suite == "payload" || suite == "all") append(microbench::run_payload_suite(cfg));
  nlohmann::json c = {
      {"suite", suite},
      {"seed", cfg.seed},
      {"block_time_ms", cfg.block_time_ms},
      {"repetitions", cfg.repetitions},
      {"max_writes_per_tx", cfg.max_writes_per_tx},
      {"base_store_size", cfg.base_store_size},
      {"rwset_sizes", cfg.rwset_sizes},
      {"kv_store_sizes", cfg.kv_store_sizes},
      {"kv_sim_ops", cfg.kv_sim_ops},
      {"payload_sizes", cfg.payload_sizes},
      {"fixed_payload", cfg.fixed_payload},
      {"cost_model",
       {{"c_base_us", sim::to_millis(cfg.costs.base) * 1e3},
        {"c_read_us", sim::to_millis(cfg.costs.per_read) * 1e3},
        {"c_write_us", sim::to_millis(cfg.costs.per_write) * 1e3},
        {"c_byte_ns", cfg.costs.per_byte_ns},
        {"c_enc_ns", cfg.costs.enc_per_byte_ns},
        {"c_dec_ns", cfg.costs.dec_per_byte_ns},
        {"notify_ms", sim::to_millis(cfg.costs.notify)}}},
      {"network",
       {{"base_latency_ms", sim::to_millis(cfg.network.base_latency)},
        {"bandwidth_mbps", cfg.network.bandwidth_bps / 1e6},
        {"jitter_ms", sim::to_millis(cfg.network.jitter)}}}};
  run.report.configs.push_back(c);
  for (const auto& r : run.micro) run.report.records.push_back(microbench::to_record(r, cfg, preset));
  return run;
}

}  // namespace permledger::report
