#include "permledger/report/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace permledger::report {

using harness::LatencyStats;
using harness::MetricsRecord;
using nlohmann::json;

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fixed(*v) : std::string(); }

// Quotes fields that would break the row.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void require_records(const Report& r) {
  if (r.records.empty()) throw std::invalid_argument("report has no records");
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

std::string to_csv(const Report& r) {
  require_records(r);
  std::string out;
  out += "# preset: " + r.preset + "\n";
  out += "# seed: " + std::to_string(r.seed) + "\n";
  for (const auto& c : r.configs) out += "# config: " + c.dump() + "\n";
  out += kCsvColumns;
  out += '\n';
  for (const auto& rec : r.records) {
    const auto& l = rec.latency;
    auto lat = [&](double LatencyStats::*m) { return l ? fixed((*l).*m) : std::string(); };
    out += field(rec.preset) + ',' + field(rec.workload) + ',' + field(rec.consensus) + ',' + fixed(rec.block_time_ms) +
           ',' + opt(rec.offered_tps) + ',' + std::to_string(rec.confirmed) + ',' + std::to_string(rec.failed) + ',' +
           opt(rec.throughput_tps) + ',' + lat(&LatencyStats::avg) + ',' + lat(&LatencyStats::min) + ',' +
           lat(&LatencyStats::max) + ',' + lat(&LatencyStats::p50) + ',' + lat(&LatencyStats::p95) + ',' +
           lat(&LatencyStats::p99) + ',' + std::to_string(rec.seed) + '\n';
  }
  return out;
}

json record_to_json(const MetricsRecord& r) {
  json lat = nullptr;
  if (r.latency) {
    lat = {{"avg", r.latency->avg}, {"min", r.latency->min}, {"max", r.latency->max},
           {"p50", r.latency->p50}, {"p95", r.latency->p95}, {"p99", r.latency->p99}};
  }
  return {{"preset", r.preset},
          {"workload", r.workload},
          {"consensus", r.consensus},
          {"block_time_ms", r.block_time_ms},
          {"offered_tps", opt_json(r.offered_tps)},
          {"submitted", r.submitted},
          {"confirmed", r.confirmed},
          {"failed", r.failed},
          {"throughput_tps", opt_json(r.throughput_tps)},
          {"latency_s", lat},
          {"window_s", opt_json(r.window_s)},
          {"seed", r.seed}};
}

MetricsRecord record_from_json(const json& j) {
  MetricsRecord r;
  r.preset = j.at("preset").get<std::string>();
  r.workload = j.at("workload").get<std::string>();
  r.consensus = j.at("consensus").get<std::string>();
  r.block_time_ms = j.at("block_time_ms").get<double>();
  r.offered_tps = opt_from(j, "offered_tps");
  r.submitted = j.at("submitted").get<std::uint64_t>();
  r.confirmed = j.at("confirmed").get<std::uint64_t>();
  r.failed = j.at("failed").get<std::uint64_t>();
  r.throughput_tps = opt_from(j, "throughput_tps");
  if (auto it = j.find("latency_s"); it != j.end() && !it->is_null()) {
    r.latency = LatencyStats{it->at("avg").get<double>(), it->at("min").get<double>(), it->at("max").get<double>(),
                             it->at("p50").get<double>(), it->at("p95").get<double>(), it->at("p99").get<double>()};
  }
  r.window_s = opt_from(j, "window_s");
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

std::string to_json_text(const Report& r) {
  require_records(r);
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(record_to_json(rec));
  json out = {{"preset", r.preset}, {"seed", r.seed}, {"configs", r.configs}, {"records", records}};
  return out.dump(2) + "\n";
}

Report report_from_json(const json& j) {
  Report r;
  r.preset = j.at("preset").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("configs")) r.configs.push_back(c);
  for (const auto& rec : j.at("records")) r.records.push_back(record_from_json(rec));
  return r;
}

void emit_report(const Report& r, Format format, const std::string& path) {
  const std::string text = format == Format::Csv ? to_csv(r) : to_json_text(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::vector<std::string> write_reports(const Report& r, const std::string& dir, const std::vector<Format>& formats) {
  require_records(r);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  std::vector<std::string> paths;
  for (auto f : formats) {
    const auto path = (std::filesystem::path(dir) / (r.preset + (f == Format::Csv ? ".csv" : ".json"))).string();
    emit_report(r, f, path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace permledger::report
