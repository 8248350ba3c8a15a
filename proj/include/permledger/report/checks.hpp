#pragma once

#include <string>
#include <vector>

#include "permledger/report/presets.hpp"

namespace permledger::report {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Per round: submitted = confirmed + failed, throughput * window = confirmed.
std::vector<CheckResult> check_metric_identities(const PresetRun& run);

// Trend assertions for a preset run (the `--check` mode), including the
// metric identities.
std::vector<CheckResult> check_preset(const std::string& name, const PresetRun& run);

std::vector<CheckResult> check_table1(const PresetRun& run);
std::vector<CheckResult> check_workloads(const PresetRun& run);
std::vector<CheckResult> check_raft_vs_ibft(const PresetRun& run);
std::vector<CheckResult> check_private_vs_public(const PresetRun& run);
std::vector<CheckResult> check_microbench(const PresetRun& run, const microbench::MicrobenchConfig& cfg);

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace permledger::report
