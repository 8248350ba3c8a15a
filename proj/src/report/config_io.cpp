#include "permledger/report/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace permledger::report {

using harness::ExperimentConfig;
using ledger::NodeId;
using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError(join(path, key), "expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
      if (std::is_unsigned_v<T> && it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0) {
        throw ConfigError(join(path, key), "must not be negative");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(join(path, key), "expected a string");
    }
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join(path, key), e.what());
  }
}

template <class E>
E parse_enum(const json& obj, const std::string& path, const char* key, E current,
             std::initializer_list<std::pair<const char*, E>> names) {
  auto it = obj.find(key);
  if (it == obj.end()) return current;
  if (!it->is_string()) throw ConfigError(join(path, key), "expected a string");
  const auto s = it->get<std::string>();
  for (const auto& [name, value] : names) {
    if (s == name) return value;
  }
  std::string options;
  for (const auto& [name, value] : names) options += (options.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(join(path, key), "unknown value '" + s + "' (expected one of: " + options + ")");
}

const std::initializer_list<std::pair<const char*, node::Algorithm>> kAlgorithms = {
    {"raft", node::Algorithm::Raft}, {"ibft", node::Algorithm::Ibft}};
const std::initializer_list<std::pair<const char*, consensus::IbftPacing>> kPacing = {
    {"drain-at-commit", consensus::IbftPacing::DrainAtCommit},
    {"drain-at-proposal", consensus::IbftPacing::DrainAtProposal}};
const std::initializer_list<std::pair<const char*, consensus::IbftBehavior>> kBehaviors = {
    {"honest", consensus::IbftBehavior::Honest},
    {"equivocating-proposer", consensus::IbftBehavior::EquivocatingProposer},
    {"silent", consensus::IbftBehavior::Silent}};
const std::initializer_list<std::pair<const char*, harness::WorkloadKind>> kWorkloads = {
    {"write", harness::WorkloadKind::Write},
    {"null", harness::WorkloadKind::Null},
    {"read", harness::WorkloadKind::Read},
    {"mix50", harness::WorkloadKind::Mix50},
    {"rwset", harness::WorkloadKind::ReadWriteSet}};
const std::initializer_list<std::pair<const char*, harness::PeerPolicy>> kPolicies = {
    {"one-per-client", harness::PeerPolicy::OnePerClient}, {"single-peer", harness::PeerPolicy::SinglePeer}};
const std::initializer_list<std::pair<const char*, harness::Arrival>> kArrivals = {
    {"uniform", harness::Arrival::Uniform}, {"poisson", harness::Arrival::Poisson}};

void parse_consensus(const json& j, ExperimentConfig& cfg) {
  const std::string p = "consensus";
  check_keys(j, p,
             {"algorithm", "block_time_ms", "n", "f", "learners", "max_txs_per_block", "election_timeout_ms",
              "heartbeat_ms", "round_timeout_ms", "pacing", "byzantine"});
  auto& c = cfg.cluster;
  c.algorithm = parse_enum(j, p, "algorithm", c.algorithm, kAlgorithms);
  const bool raft = c.algorithm == node::Algorithm::Raft;
  double bt = raft ? 50.0 : 1000.0;
  read(j, p, "block_time_ms", bt);
  c.raft.block_time = sim::millis(bt);
  c.ibft.block_time = sim::millis(bt);
  std::uint32_t n = raft ? 3 : 4;
  std::uint32_t f = 1;
  read(j, p, "n", n);
  read(j, p, "f", f);
  c.raft.voters = n;
  c.raft.f = f;
  c.ibft.n = n;
  c.ibft.f = f;
  read(j, p, "learners", c.raft.learners);
  std::size_t max_txs = 4096;
  read(j, p, "max_txs_per_block", max_txs);
  c.raft.max_txs = max_txs;
  c.ibft.max_txs = max_txs;
  if (auto it = j.find("election_timeout_ms"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      throw ConfigError(join(p, "election_timeout_ms"), "expected [min, max]");
    }
    c.raft.election_min = sim::millis((*it)[0].get<double>());
    c.raft.election_max = sim::millis((*it)[1].get<double>());
  }
  if (j.contains("heartbeat_ms")) {
    double hb = 0;
    read(j, p, "heartbeat_ms", hb);
    c.raft.heartbeat = sim::millis(hb);
  }
  if (j.contains("round_timeout_ms")) {
    double rt = 0;
    read(j, p, "round_timeout_ms", rt);
    c.ibft.round_timeout = sim::millis(rt);
  }
  c.ibft.pacing = parse_enum(j, p, "pacing", c.ibft.pacing, kPacing);
  if (auto it = j.find("byzantine"); it != j.end()) {
    const std::string bp = join(p, "byzantine");
    if (!it->is_object()) throw ConfigError(bp, "expected an object of node id -> behavior");
    for (const auto& [key, value] : it->items()) {
      NodeId id = 0;
      try {
        std::size_t used = 0;
        const auto v = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
        id = static_cast<NodeId>(v);
      } catch (const std::exception&) {
        throw ConfigError(bp + "." + key, "node id must be a non-negative integer");
      }
      json wrapper = {{"b", value}};
      c.byzantine[id] = parse_enum(wrapper, bp + "." + key, "b", consensus::IbftBehavior::Honest, kBehaviors);
    }
  }
}

void parse_network(const json& j, ExperimentConfig& cfg) {
  const std::string p = "network";
  check_keys(j, p, {"base_latency_ms", "bandwidth_mbps", "jitter_ms"});
  auto& n = cfg.cluster.network;
  double base = sim::to_millis(n.base_latency), bw = n.bandwidth_bps / 1e6, jitter = sim::to_millis(n.jitter);
  read(j, p, "base_latency_ms", base);
  read(j, p, "bandwidth_mbps", bw);
  read(j, p, "jitter_ms", jitter);
  if (base < 0) throw ConfigError(join(p, "base_latency_ms"), "must not be negative");
  if (bw <= 0) throw ConfigError(join(p, "bandwidth_mbps"), "must be positive");
  if (jitter < 0) throw ConfigError(join(p, "jitter_ms"), "must not be negative");
  n.base_latency = sim::millis(base);
  n.bandwidth_bps = bw * 1e6;
  n.jitter = sim::millis(jitter);
}

void parse_costs(const json& j, ExperimentConfig& cfg) {
  const std::string p = "cost_model";
  check_keys(j, p, {"c_base_us", "c_read_us", "c_write_us", "c_byte_ns", "c_enc_ns", "c_dec_ns", "notify_ms"});
  auto& c = cfg.cluster.costs;
  double base = sim::to_millis(c.base) * 1e3, rd = sim::to_millis(c.per_read) * 1e3,
         wr = sim::to_millis(c.per_write) * 1e3, notify = sim::to_millis(c.notify);
  read(j, p, "c_base_us", base);
  read(j, p, "c_read_us", rd);
  read(j, p, "c_write_us", wr);
  read(j, p, "c_byte_ns", c.per_byte_ns);
  read(j, p, "c_enc_ns", c.enc_per_byte_ns);
  read(j, p, "c_dec_ns", c.dec_per_byte_ns);
  read(j, p, "notify_ms", notify);
  for (auto [key, v] : {std::pair{"c_base_us", base}, {"c_read_us", rd}, {"c_write_us", wr},
                        {"c_byte_ns", c.per_byte_ns}, {"c_enc_ns", c.enc_per_byte_ns},
                        {"c_dec_ns", c.dec_per_byte_ns}, {"notify_ms", notify}}) {
    if (v < 0) throw ConfigError(join(p, key), "must not be negative");
  }
  c.base = sim::micros(base);
  c.per_read = sim::micros(rd);
  c.per_write = sim::micros(wr);
  c.notify = sim::millis(notify);
}

void parse_workload(const json& j, ExperimentConfig& cfg) {
  const std::string p = "workload";
  check_keys(j, p,
             {"kind", "key_space", "initial_entries", "payload_size", "event_payload_size", "target_peer_policy",
              "single_peer", "reads", "writes"});
  auto& w = cfg.workload;
  w.kind = parse_enum(j, p, "kind", w.kind, kWorkloads);
  if (w.kind == harness::WorkloadKind::Read) w.peer_policy = harness::PeerPolicy::SinglePeer;
  read(j, p, "key_space", w.key_space);
  read(j, p, "initial_entries", w.initial_entries);
  read(j, p, "payload_size", w.payload_size);
  read(j, p, "event_payload_size", w.event_payload_size);
  w.peer_policy = parse_enum(j, p, "target_peer_policy", w.peer_policy, kPolicies);
  read(j, p, "single_peer", w.single_peer);
  read(j, p, "reads", w.reads);
  read(j, p, "writes", w.writes);
}

void parse_schedule(const json& j, ExperimentConfig& cfg) {
  const std::string p = "schedule";
  check_keys(j, p,
             {"clients", "rates", "round_pause_s", "rounds", "tx_cap", "drain_timeout_s", "arrival", "warmup_s",
              "ack_timeout_s"});
  auto& s = cfg.schedule;
  read(j, p, "clients", s.clients);
  if (auto it = j.find("rates"); it != j.end()) {
    if (!it->is_array()) throw ConfigError(join(p, "rates"), "expected an array of numbers");
    s.rates.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_number()) throw ConfigError(join(p, "rates") + "[" + std::to_string(i) + "]", "expected a number");
      s.rates.push_back((*it)[i].get<double>());
    }
  }
  read(j, p, "round_pause_s", s.round_pause_s);
  read(j, p, "rounds", s.rounds);
  read(j, p, "tx_cap", s.tx_cap);
  read(j, p, "drain_timeout_s", s.drain_timeout_s);
  s.arrival = parse_enum(j, p, "arrival", s.arrival, kArrivals);
  read(j, p, "warmup_s", s.warmup_s);
  read(j, p, "ack_timeout_s", s.ack_timeout_s);
}

void parse_privacy(const json& j, ExperimentConfig& cfg) {
  const std::string p = "privacy";
  if (j.is_null()) return;
  check_keys(j, p, {"group"});
  harness::PrivacySpec spec;
  auto it = j.find("group");
  if (it == j.end() || !it->is_array()) throw ConfigError(join(p, "group"), "expected an array of node ids");
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& v = (*it)[i];
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(join(p, "group") + "[" + std::to_string(i) + "]", "expected a node id");
    }
    spec.group.push_back((*it)[i].get<NodeId>());
  }
  cfg.privacy = std::move(spec);
}

void parse_faults(const json& j, ExperimentConfig& cfg) {
  const std::string p = "faults";
  check_keys(j, p, {"crash_leader_at_s", "crash_nodes"});
  if (auto it = j.find("crash_leader_at_s"); it != j.end() && !it->is_null()) {
    double t = 0;
    read(j, p, "crash_leader_at_s", t);
    cfg.faults.crash_leader_at_s = t;
  }
  read(j, p, "crash_nodes", cfg.faults.crash_nodes);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "", {"name", "seed", "consensus", "network", "cost_model", "workload", "schedule", "privacy", "faults"});
  ExperimentConfig cfg;
  read(j, "", "name", cfg.name);
  read(j, "", "seed", cfg.seed);
  if (auto it = j.find("consensus"); it != j.end()) parse_consensus(*it, cfg);
  if (auto it = j.find("network"); it != j.end()) parse_network(*it, cfg);
  if (auto it = j.find("cost_model"); it != j.end()) parse_costs(*it, cfg);
  if (auto it = j.find("workload"); it != j.end()) parse_workload(*it, cfg);
  if (auto it = j.find("schedule"); it != j.end()) parse_schedule(*it, cfg);
  if (auto it = j.find("privacy"); it != j.end()) parse_privacy(*it, cfg);
  if (auto it = j.find("faults"); it != j.end()) parse_faults(*it, cfg);
  auto errors = validate_config(cfg);
  if (!errors.empty()) throw errors.front();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  json j;
  try {
    j = json::parse(in, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::vector<ConfigError> validate_config(const ExperimentConfig& cfg) {
  std::vector<ConfigError> errors;
  auto err = [&](const std::string& path, const std::string& msg) { errors.emplace_back(path, msg); };
  const auto& c = cfg.cluster;
  if (c.algorithm == node::Algorithm::Raft) {
    if (c.raft.voters != 2 * c.raft.f + 1) err("consensus.n", "raft requires n = 2f+1");
    if (c.raft.block_time < sim::millis(1)) err("consensus.block_time_ms", "raft block time must be at least 1 ms");
    if (c.raft.election_min <= sim::Duration::zero() || c.raft.election_max < c.raft.election_min) {
      err("consensus.election_timeout_ms", "expected 0 < min <= max");
    }
    if (c.raft.heartbeat && *c.raft.heartbeat <= sim::Duration::zero()) err("consensus.heartbeat_ms", "must be positive");
    if (!c.byzantine.empty()) err("consensus.byzantine", "byzantine behaviours apply to ibft only");
  } else {
    if (c.ibft.n != 3 * c.ibft.f + 1) err("consensus.n", "ibft requires n = 3f+1");
    if (c.ibft.block_time < sim::millis(1000)) err("consensus.block_time_ms", "ibft block time must be at least 1000 ms");
    if (c.raft.learners != 0) err("consensus.learners", "learners apply to raft only");
    if (c.ibft.round_timeout && *c.ibft.round_timeout <= sim::Duration::zero()) {
      err("consensus.round_timeout_ms", "must be positive");
    }
    std::uint32_t faulty = 0;
    for (const auto& [id, b] : c.byzantine) {
      if (id >= c.ibft.n) err("consensus.byzantine." + std::to_string(id), "unknown node");
      if (b != consensus::IbftBehavior::Honest) ++faulty;
    }
    if (faulty > c.ibft.f) err("consensus.byzantine", "more faulty validators than f");
  }
  const std::size_t max_txs = c.algorithm == node::Algorithm::Raft ? c.raft.max_txs : c.ibft.max_txs;
  if (max_txs == 0) err("consensus.max_txs_per_block", "must be positive");

  const auto& w = cfg.workload;
  if (w.key_space == 0) err("workload.key_space", "must be positive");
  if (w.payload_size > ledger::kMaxPayloadBytes) err("workload.payload_size", "exceeds 32768 bytes");
  if (w.event_payload_size > ledger::kMaxPayloadBytes) err("workload.event_payload_size", "exceeds 32768 bytes");
  if (w.kind == harness::WorkloadKind::Read && w.peer_policy != harness::PeerPolicy::SinglePeer) {
    err("workload.target_peer_policy", "read workload requires single-peer");
  }
  const auto nodes = c.node_count();
  if (w.single_peer >= nodes) err("workload.single_peer", "unknown node");

  const auto& s = cfg.schedule;
  if (s.clients == 0) err("schedule.clients", "must be positive");
  if (s.rates.empty()) err("schedule.rates", "must not be empty");
  for (std::size_t i = 0; i < s.rates.size(); ++i) {
    if (!(s.rates[i] > 0)) err("schedule.rates[" + std::to_string(i) + "]", "must be positive");
  }
  if (s.rounds == 0) err("schedule.rounds", "must be positive");
  if (s.tx_cap < s.rounds) err("schedule.tx_cap", "must allow at least one transaction per round");
  if (s.round_pause_s < 0) err("schedule.round_pause_s", "must not be negative");
  if (s.drain_timeout_s < 0) err("schedule.drain_timeout_s", "must not be negative");
  if (s.warmup_s < 0) err("schedule.warmup_s", "must not be negative");
  if (!(s.ack_timeout_s > 0)) err("schedule.ack_timeout_s", "must be positive");

  if (cfg.privacy) {
    std::set<NodeId> members(cfg.privacy->group.begin(), cfg.privacy->group.end());
    if (members.size() < 2) err("privacy.group", "needs at least two distinct nodes");
    for (auto m : members) {
      if (m >= nodes) err("privacy.group", "unknown node " + std::to_string(m));
    }
    if (w.kind == harness::WorkloadKind::Read || w.kind == harness::WorkloadKind::Mix50) {
      // Reads of private state are served by members only.
      if (w.peer_policy == harness::PeerPolicy::SinglePeer && !members.contains(w.single_peer)) {
        err("workload.single_peer", "must be a privacy group member");
      }
    }
  }
  if (cfg.faults.crash_leader_at_s && *cfg.faults.crash_leader_at_s < 0) {
    err("faults.crash_leader_at_s", "must not be negative");
  }
  for (auto n : cfg.faults.crash_nodes) {
    if (n >= nodes) err("faults.crash_nodes", "unknown node " + std::to_string(n));
  }
  return errors;
}

json config_to_json(const ExperimentConfig& cfg) {
  const auto& c = cfg.cluster;
  const bool raft = c.algorithm == node::Algorithm::Raft;
  json consensus = {{"algorithm", node::algorithm_name(c.algorithm)},
                    {"block_time_ms", cfg.block_time_ms()},
                    {"n", raft ? c.raft.voters : c.ibft.n},
                    {"f", raft ? c.raft.f : c.ibft.f},
                    {"max_txs_per_block", raft ? c.raft.max_txs : c.ibft.max_txs}};
  if (raft) {
    consensus["learners"] = c.raft.learners;
    consensus["election_timeout_ms"] = {sim::to_millis(c.raft.election_min), sim::to_millis(c.raft.election_max)};
    consensus["heartbeat_ms"] = sim::to_millis(c.raft.heartbeat_interval());
  } else {
    consensus["round_timeout_ms"] = sim::to_millis(c.ibft.round_timeout_value());
    consensus["pacing"] = consensus::ibft_pacing_name(c.ibft.pacing);
    json byz = json::object();
    for (const auto& [id, b] : c.byzantine) byz[std::to_string(id)] = consensus::ibft_behavior_name(b);
    consensus["byzantine"] = byz;
  }
  const auto& n = c.network;
  const auto& k = c.costs;
  const auto& w = cfg.workload;
  const auto& s = cfg.schedule;
  json out = {
      {"name", cfg.name},
      {"seed", cfg.seed},
      {"consensus", consensus},
      {"network",
       {{"base_latency_ms", sim::to_millis(n.base_latency)},
        {"bandwidth_mbps", n.bandwidth_bps / 1e6},
        {"jitter_ms", sim::to_millis(n.jitter)}}},
      {"cost_model",
       {{"c_base_us", sim::to_millis(k.base) * 1e3},
        {"c_read_us", sim::to_millis(k.per_read) * 1e3},
        {"c_write_us", sim::to_millis(k.per_write) * 1e3},
        {"c_byte_ns", k.per_byte_ns},
        {"c_enc_ns", k.enc_per_byte_ns},
        {"c_dec_ns", k.dec_per_byte_ns},
        {"notify_ms", sim::to_millis(k.notify)}}},
      {"workload",
       {{"kind", harness::workload_name(w.kind)},
        {"key_space", w.key_space},
        {"initial_entries", w.initial_entries},
        {"payload_size", w.payload_size},
        {"event_payload_size", w.event_payload_size},
        {"target_peer_policy", harness::peer_policy_name(w.peer_policy)},
        {"single_peer", w.single_peer},
        {"reads", w.reads},
        {"writes", w.writes}}},
      {"schedule",
       {{"clients", s.clients},
        {"rates", s.rates},
        {"round_pause_s", s.round_pause_s},
        {"rounds", s.rounds},
        {"tx_cap", s.tx_cap},
        {"drain_timeout_s", s.drain_timeout_s},
        {"arrival", harness::arrival_name(s.arrival)},
        {"warmup_s", s.warmup_s},
        {"ack_timeout_s", s.ack_timeout_s}}},
  };
  if (cfg.privacy) out["privacy"] = {{"group", cfg.privacy->group}};
  json faults = {{"crash_nodes", cfg.faults.crash_nodes}};
  if (cfg.faults.crash_leader_at_s) faults["crash_leader_at_s"] = *cfg.faults.crash_leader_at_s;
  out["faults"] = faults;
  return out;
}

}  // namespace permledger::report
