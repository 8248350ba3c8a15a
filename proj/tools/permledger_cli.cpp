#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "permledger/report/checks.hpp"
#include "permledger/report/config_io.hpp"
#include "permledger/report/presets.hpp"

namespace {

using namespace permledger;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kCheckFailed = 3;

struct Options {
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  std::string format = "both";
  bool check = false;
  unsigned workers = 0;
};

// --seed wins over PERMLEDGER_SEED, which wins over the configured seed.
std::uint64_t resolve_seed(const Options& o, std::uint64_t configured) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("PERMLEDGER_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw report::ConfigError("PERMLEDGER_SEED", "not an unsigned integer: " + std::string(env));
  }
  return configured;
}

std::vector<report::Format> formats(const Options& o) {
  if (o.format == "csv") return {report::Format::Csv};
  if (o.format == "json") return {report::Format::Json};
  return {report::Format::Csv, report::Format::Json};
}

void print_records(const report::Report& r) {
  std::printf("%-22s %-14s %-6s %8s %9s %9s %7s %11s %9s %9s\n", "preset", "workload", "algo", "bt_ms", "offered",
              "confirmed", "failed", "throughput", "lat_avg", "lat_p99");
  for (const auto& m : r.records) {
    std::printf("%-22s %-14s %-6s %8.0f %9.1f %9llu %7llu %11.2f %9.4f %9.4f\n", m.preset.c_str(), m.workload.c_str(),
                m.consensus.c_str(), m.block_time_ms, m.offered_tps.value_or(0),
                static_cast<unsigned long long>(m.confirmed), static_cast<unsigned long long>(m.failed),
                m.throughput_tps.value_or(0), m.latency ? m.latency->avg : 0.0, m.latency ? m.latency->p99 : 0.0);
  }
}

void write(const report::Report& r, const Options& o) {
  for (const auto& p : report::write_reports(r, o.out, formats(o))) std::printf("wrote %s\n", p.c_str());
}

int report_checks(const std::vector<report::CheckResult>& checks) {
  for (const auto& c : checks) {
    std::printf("%s  %s  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  return report::all_passed(checks) ? kOk : kCheckFailed;
}

int cmd_run(const std::string& path, const Options& o) {
  auto cfg = report::load_config(path);
  cfg.seed = resolve_seed(o, cfg.seed);
  cfg.cluster.seed = cfg.seed;
  auto run = report::run_configs(cfg.name, cfg.seed, {cfg}, o.workers);
  print_records(run.report);
  write(run.report, o);
  return o.check ? report_checks(report::check_metric_identities(run)) : kOk;
}

int cmd_preset(const std::string& name, const Options& o) {
  const auto seed = resolve_seed(o, 42);
  const auto t0 = std::chrono::steady_clock::now();
  auto run = report::run_preset(name, seed, o.workers);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_records(run.report);
  std::printf("wall time %.2f s\n", wall);
  write(run.report, o);
  return o.check ? report_checks(report::check_preset(name, run)) : kOk;
}

int cmd_microbench(const std::string& suite, const Options& o) {
  microbench::MicrobenchConfig cfg;
  cfg.seed = resolve_seed(o, cfg.seed);
  auto run = report::run_microbench(suite, cfg);
  std::printf("%-36s %14s %16s  %s\n", "benchmark", "sim_latency_s", "wall_ns", "status");
  for (const auto& r : run.micro) {
    std::printf("%-36s %14.6f %16s  %s\n", r.label.c_str(), r.mean_latency_s,
                r.wall_ns ? std::to_string(static_cast<long long>(*r.wall_ns)).c_str() : "-",
                r.ok ? "ok" : r.error.c_str());
  }
  write(run.report, o);
  return o.check ? report_checks(report::check_microbench(run, cfg)) : kOk;
}

int cmd_validate(const std::string& path) {
  auto cfg = report::load_config(path);
  std::printf("%s: valid\n%s\n", path.c_str(), report::config_to_json(cfg).dump(2).c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator and benchmark harness for a permissioned ledger"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed (overrides PERMLEDGER_SEED and the config)");
    sub->add_option("--out", o.out, "Report directory")->capture_default_str();
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json", "both"}))->capture_default_str();
    sub->add_flag("--check", o.check, "Assert the expected trends; exit 3 when one fails");
    sub->add_option("--workers", o.workers, "Parallel sweep points (0 = all cores)")->capture_default_str();
  };

  std::string config_path, preset, suite;
  auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  add_common(run);
  auto* pre = app.add_subcommand("preset", "Run a predefined experiment");
  pre->add_option("name", preset, "Preset name")->required()->check(CLI::IsMember(report::preset_names()));
  add_common(pre);
  auto* micro = app.add_subcommand("microbench", "Run a micro-benchmark suite");
  micro->add_option("suite", suite, "rwset, kvsize, payload or all")
      ->required()
      ->check(CLI::IsMember({"rwset", "kvsize", "payload", "all"}));
  add_common(micro);
  auto* val = app.add_subcommand("validate", "Check a config file without running it");
  val->add_option("config", config_path, "Config file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, o);
    if (*pre) return cmd_preset(preset, o);
    if (*micro) return cmd_microbench(suite, o);
    if (*val) return cmd_validate(config_path);
  } catch (const report::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}
