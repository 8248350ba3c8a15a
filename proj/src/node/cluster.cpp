#include "permledger/node/cluster.hpp"

#include <algorithm>
#include <stdexcept>

namespace permledger::node {

namespace {
constexpr std::size_t kAckBytes = 32 + 16;
constexpr std::size_t kReadRequestBytes = 64;
}  // namespace

const char* algorithm_name(Algorithm a) { return a == Algorithm::Raft ? "raft" : "ibft"; }

std::uint32_t ClusterConfig::node_count() const {
  return algorithm == Algorithm::Raft ? raft.voters + raft.learners : ibft.n;
}

Cluster::Cluster(ClusterConfig cfg)
    : cfg_(std::move(cfg)), network_(sched_, cfg_.network, sim::Rng::stream(cfg_.seed, 1)) {
  const auto n = cfg_.node_count();
  if (n == 0) throw std::invalid_argument("cluster needs at least one node");
  for (NodeId i = 0; i < n; ++i) {
    nodes_.push_back(std::make_unique<Node>(*this, i, cfg_.seed, cfg_.costs, directory_));
    directory_.emplace(i, nodes_.back()->enclave().public_key());
  }
  for (auto& node : nodes_) {
    if (cfg_.algorithm == Algorithm::Raft) {
      node->set_engine(std::make_unique<consensus::RaftEngine>(*node, cfg_.raft));
    } else {
      auto ibft = cfg_.ibft;
      if (auto it = cfg_.byzantine.find(node->self()); it != cfg_.byzantine.end()) ibft.behavior = it->second;
      node->set_engine(std::make_unique<consensus::IbftEngine>(*node, ibft));
    }
  }
}

void Cluster::start() {
  for (auto& node : nodes_) node->engine().start();
}

ledger::ContractAddress Cluster::deploy_contract(std::uint64_t initial_entries, ledger::Visibility visibility,
                                                 std::optional<std::vector<NodeId>> group, std::uint64_t seed,
                                                 std::size_t event_payload_size) {
  const auto addr = next_address_;
  if (visibility == ledger::Visibility::Public) {
    for (auto& node : nodes_) {
      ledger::ContractState state(addr, visibility, std::nullopt, event_payload_size);
      state.preload(initial_entries, seed);
      node->ledger().add_contract(std::move(state));
    }
  } else {
    if (!group) throw std::invalid_argument("private contract requires a privacy group");
    auto g = privacy::PrivacyGroup::make(*group);
    for (auto m : g.members) {
      if (m >= size()) throw std::invalid_argument("privacy group names unknown node " + std::to_string(m));
    }
    for (auto m : g.members) {
      ledger::ContractState state(addr, visibility, g.id, event_payload_size);
      state.preload(initial_entries, seed);
      nodes_[m]->tm().add_contract(g, std::move(state));
      nodes_[m]->ledger().add_private_address(addr);
    }
  }
  ++next_address_;
  return addr;
}

void Cluster::register_client(ClientId client, ClientSink* sink) { clients_[client] = sink; }

ClientSink* Cluster::sink(ClientId client) const {
  auto it = clients_.find(client);
  return it == clients_.end() ? nullptr : it->second;
}

void Cluster::subscribe(ClientId client, NodeId node) {
  if (auto it = subscription_.find(client); it != subscription_.end()) {
    auto& subs = subscribers_[it->second];
    subs.erase(std::remove(subs.begin(), subs.end(), client), subs.end());
  }
  subscription_[client] = node;
  subscribers_[node].push_back(client);
}

void Cluster::submit(ClientId client, NodeId node, ledger::Transaction tx) {
  const auto bytes = tx.wire_size() + tx.call.payload.size();
  network_.send(sim::client_actor(client), sim::node_actor(node), bytes, sim::Traffic::Client,
                [this, client, node, tx = std::move(tx)]() mutable {
                  nodes_[node]->on_client_submit(client, std::move(tx));
                });
}

void Cluster::read(ClientId client, NodeId node, std::uint64_t request_id, ledger::ContractAddress contract,
                   std::string key) {
  network_.send(sim::client_actor(client), sim::node_actor(node), kReadRequestBytes + key.size(),
                sim::Traffic::Client, [this, client, node, request_id, contract, key = std::move(key)] {
                  nodes_[node]->on_read(client, request_id, contract, key);
                });
}

void Cluster::crash(NodeId node) {
  nodes_.at(node)->crash();
  network_.set_down(sim::node_actor(node), true);
}

std::optional<NodeId> Cluster::leader() const {
  for (const auto& node : nodes_) {
    if (node->crashed()) continue;
    if (auto l = node->engine().leader(); l && *l == node->self()) return l;
  }
  return std::nullopt;
}

bool Cluster::chains_consistent() const {
  std::uint64_t max_height = 0;
  for (const auto& node : nodes_) max_height = std::max(max_height, node->ledger().height());
  for (std::uint64_t h = 0; h <= max_height; ++h) {
    const ledger::Hash256* seen = nullptr;
    for (const auto& node : nodes_) {
      if (node->ledger().height() < h) continue;
      const auto& hash = node->ledger().block_at(h)->hash;
      if (seen && *seen != hash) return false;
      seen = &hash;
    }
  }
  return true;
}

nlohmann::json Cluster::dump_chain(NodeId id) const {
  const auto& node = *nodes_.at(id);
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : node.ledger().chain()) {
    nlohmann::json txs = nlohmann::json::array();
    for (const auto& tx : b->txs) {
      txs.push_back({{"id", ledger::to_hex(tx.id)},
                     {"sender", tx.sender},
                     {"contract", tx.contract},
                     {"private", tx.is_private()},
                     {"call_data_bytes", tx.call_data_size()}});
    }
    blocks.push_back({{"height", b->height},
                      {"hash", ledger::to_hex(b->hash)},
                      {"parent", ledger::to_hex(b->parent_hash)},
                      {"proposer", b->proposer},
                      {"timestamp_ns", b->timestamp.time_since_epoch().count()},
                      {"txs", std::move(txs)}});
  }
  nlohmann::json contracts = nlohmann::json::object();
  for (const auto& [addr, c] : node.ledger().contracts()) {
    contracts[std::to_string(addr)] = {{"entries", c.size()}, {"digest", ledger::to_hex(c.digest())}};
  }
  return {{"node", id}, {"height", node.ledger().height()}, {"chain", std::move(blocks)}, {"contracts", contracts}};
}

void Cluster::send_message(NodeId from, NodeId to, consensus::Message m) {
  const auto bytes = consensus::wire_size(m);
  const auto kind = consensus::traffic_kind(m);
  network_.send(sim::node_actor(from), sim::node_actor(to), bytes, kind,
                [this, from, to, m = std::move(m)] { nodes_[to]->on_peer_message(from, m); });
}

void Cluster::send_payload(NodeId from, NodeId to, const privacy::EncryptedPayload& payload) {
  network_.send(sim::node_actor(from), sim::node_actor(to), payload.wire_size(), sim::Traffic::Privacy,
                [this, to, payload] { nodes_[to]->on_private_payload(payload); });
}

void Cluster::send_ack(NodeId from, ClientId to, const ledger::TxId& tx, ledger::SubmitError error) {
  auto* s = sink(to);
  if (!s) return;
  network_.send(sim::node_actor(from), sim::client_actor(to), kAckBytes, sim::Traffic::Client,
                [s, tx, error] { s->on_ack(tx, error); });
}

void Cluster::send_read_response(NodeId from, ClientId to, sim::SimTime depart, std::uint64_t request_id,
                                 ledger::ReadResult result) {
  auto* s = sink(to);
  if (!s) return;
  const auto bytes = kReadRequestBytes + result.value.size();
  network_.send_at(depart, sim::node_actor(from), sim::client_actor(to), bytes, sim::Traffic::Client,
                   [s, request_id, result = std::move(result)] { s->on_read_response(request_id, result); });
}

void Cluster::emit_event(NodeId from, std::shared_ptr<const ledger::BlockEvent> event, sim::SimTime ready) {
  auto it = subscribers_.find(from);
  if (it == subscribers_.end()) return;
  const auto depart = ready + cfg_.costs.notify;
  for (auto client : it->second) {
    auto* s = sink(client);
    if (!s) continue;
    network_.send_at(depart, sim::node_actor(from), sim::client_actor(client), event->wire_size(),
                     sim::Traffic::Event, [s, event] { s->on_block_event(event); });
  }
}

void Cluster::send_receipt(NodeId from, ClientId to, std::shared_ptr<const ledger::BlockEvent> receipt) {
  auto* s = sink(to);
  if (!s) return;
  network_.send_at(sched_.now() + cfg_.costs.notify, sim::node_actor(from), sim::client_actor(to),
                   receipt->wire_size(), sim::Traffic::Event, [s, receipt] { s->on_block_event(receipt); });
}

}  // namespace permledger::node
