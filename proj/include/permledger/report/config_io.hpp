#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "permledger/harness/config.hpp"

namespace permledger::report {

// A configuration problem, tagged with the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Parses and validates; missing fields take defaults, unknown keys are errors.
harness::ExperimentConfig config_from_json(const nlohmann::json& j);
harness::ExperimentConfig load_config(const std::string& path);

// The fully resolved configuration, every field present.
nlohmann::json config_to_json(const harness::ExperimentConfig& cfg);

// Cross-field constraints. Empty when the configuration is valid.
std::vector<ConfigError> validate_config(const harness::ExperimentConfig& cfg);

}  // namespace permledger::report
