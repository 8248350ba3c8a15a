#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "permledger/harness/experiment.hpp"
#include "permledger/microbench/microbench.hpp"
#include "permledger/report/report.hpp"

namespace permledger::report {

const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);

// The experiment configurations a sweep preset runs, in report order. Empty
// for microbench-all. Throws std::invalid_argument for an unknown name.
std::vector<harness::ExperimentConfig> preset_configs(const std::string& name, std::uint64_t seed);

struct PresetRun {
  Report report;
  // One entry per configuration, each holding one result per rate.
  std::vector<std::vector<harness::RateResult>> sweeps;
  std::vector<microbench::MicrobenchResult> micro;
};

PresetRun run_configs(const std::string& preset, std::uint64_t seed,
                      const std::vector<harness::ExperimentConfig>& configs, unsigned workers = 0,
                      const harness::Inspector& inspect = {});
PresetRun run_preset(const std::string& name, std::uint64_t seed, unsigned workers = 0,
                     const harness::Inspector& inspect = {});

// Microbenchmark suites: rwset, kvsize, payload, all.
bool is_microbench_suite(const std::string& suite);
PresetRun run_microbench(const std::string& suite, const microbench::MicrobenchConfig& cfg);

}  // namespace permledger::report
