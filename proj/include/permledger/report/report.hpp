#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "permledger/harness/metrics.hpp"

namespace permledger::report {

enum class Format { Csv, Json };

// A set of result rows plus the resolved configuration(s) that produced them.
struct Report {
  std::string preset;
  std::uint64_t seed = 0;
  std::vector<nlohmann::json> configs;
  std::vector<harness::MetricsRecord> records;
};

inline constexpr const char* kCsvColumns =
    "preset,workload,consensus,block_time_ms,offered_tps,confirmed,failed,throughput_tps,"
    "lat_avg_s,lat_min_s,lat_max_s,lat_p50_s,lat_p95_s,lat_p99_s,seed";

// Throws std::invalid_argument on an empty record set.
std::string to_csv(const Report& r);
std::string to_json_text(const Report& r);

nlohmann::json record_to_json(const harness::MetricsRecord& r);
harness::MetricsRecord record_from_json(const nlohmann::json& j);
Report report_from_json(const nlohmann::json& j);

// Writes the report to `path`. Nothing is written for an empty record set.
// Throws std::runtime_error when the file cannot be written.
void emit_report(const Report& r, Format format, const std::string& path);

// Writes <dir>/<preset>.csv and/or .json; returns the paths written.
std::vector<std::string> write_reports(const Report& r, const std::string& dir, const std::vector<Format>& formats);

}  // namespace permledger::report
