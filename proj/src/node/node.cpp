#include "permledger/node/node.hpp"

#include <algorithm>

#include "permledger/node/cluster.hpp"

namespace permledger::node {

Node::Node(Cluster& cluster, NodeId id, std::uint64_t seed, const ledger::CostModel& costs,
           const privacy::TransactionManager::Directory& directory)
    : cluster_(cluster),
      id_(id),
      ledger_(id, costs),
      enclave_(id, seed),
      tm_(id, enclave_, directory, costs),
      rng_(sim::Rng::stream(seed, 1000 + id)),
      payload_rng_(sim::Rng::stream(seed, 2000 + id)) {}

std::uint32_t Node::cluster_size() const { return cluster_.size(); }

sim::SimTime Node::now() const { return cluster_.scheduler().now(); }

void Node::send(NodeId to, consensus::Message m) {
  if (!crashed_) cluster_.send_message(id_, to, std::move(m));
}

void Node::broadcast(const consensus::Message& m) {
  if (crashed_) return;
  for (NodeId p = 0; p < cluster_.size(); ++p) {
    if (p != id_) cluster_.send_message(id_, p, m);
  }
}

void Node::set_timer(sim::Duration delay, std::uint64_t token) {
  cluster_.scheduler().schedule(delay, sim::node_actor(id_), [this, token] {
    if (!crashed_) engine_->on_timer(token);
  });
}

void Node::defer(sim::SimTime when, std::function<void()> fn) {
  cluster_.scheduler().schedule_at(std::max(when, now()), sim::node_actor(id_), [this, fn = std::move(fn)] {
    if (!crashed_) fn();
  });
}

sim::SimTime Node::charge_exec(sim::Duration cost) {
  exec_free_ = std::max(exec_free_, now()) + cost;
  stats_.exec_busy += cost;
  return exec_free_;
}

sim::SimTime Node::charge_enclave(sim::Duration cost) {
  enclave_free_ = std::max(enclave_free_, now()) + cost;
  stats_.enclave_busy += cost;
  return enclave_free_;
}

sim::SimTime Node::execute(const consensus::BlockPtr& block) {
  auto it = executed_.find(block->hash);
  if (it != executed_.end()) return it->second.second;
  const auto ready = charge_exec(ledger_.block_cost(*block));
  executed_.emplace(block->hash, std::make_pair(block->height, ready));
  return ready;
}

bool Node::commit(const consensus::BlockPtr& block) {
  if (crashed_) return false;
  auto result = ledger_.apply_block(block, now());
  if (!result.ok) {
    ++stats_.blocks_rejected;
    return false;
  }
  ++stats_.blocks_committed;
  sim::SimTime exec_ready;
  if (auto it = executed_.find(block->hash); it != executed_.end()) {
    exec_ready = it->second.second;
  } else {
    exec_ready = charge_exec(result.cost);
  }
  std::erase_if(executed_, [h = block->height](const auto& kv) { return kv.second.first <= h; });

  sim::SimTime ready = std::max(exec_ready, now());
  for (auto idx : result.private_txs) {
    for (const auto& r : tm_.execute(block->txs[idx])) {
      if (r.cost > sim::Duration::zero()) ready = std::max(ready, charge_enclave(r.cost));
    }
  }
  cluster_.emit_event(id_, std::make_shared<const ledger::BlockEvent>(std::move(result.event)), ready);
  return true;
}

void Node::account_private(const std::vector<privacy::PrivateExecution>& results) {
  for (const auto& r : results) {
    if (r.cost > sim::Duration::zero()) charge_enclave(r.cost);
  }
}

void Node::on_client_submit(ClientId client, ledger::Transaction tx) {
  if (crashed_) return;
  tx.origin = id_;
  ledger::SubmitError err = ledger::SubmitError::None;
  const privacy::PrivacyGroup* group = nullptr;
  if (tx.call.payload.size() > ledger::kMaxPayloadBytes) {
    err = ledger::SubmitError::PayloadTooLarge;
  } else if (tx.privacy_group) {
    group = tm_.group_of(tx.contract);
    if (!group) err = ledger::SubmitError::UnknownContract;
  } else if (!ledger_.knows_contract(tx.contract)) {
    err = ledger::SubmitError::UnknownContract;
  }
  cluster_.send_ack(id_, client, tx.id, err);
  if (err != ledger::SubmitError::None) return;

  if (auto h = ledger_.committed_height(tx.id)) {
    auto receipt = std::make_shared<ledger::BlockEvent>();
    receipt->node = id_;
    receipt->per_tx.push_back({tx.id, now()});
    cluster_.send_receipt(id_, client, std::move(receipt));
    return;
  }
  if (group) {
    if (private_seen_.insert(tx.id).second) submit_private(tx, *group);
    return;
  }
  tx.submit_time = now();
  engine_->on_client_tx(std::move(tx));
}

void Node::submit_private(const ledger::Transaction& tx, const privacy::PrivacyGroup& group) {
  const auto& costs = ledger_.costs();
  const auto ready = charge_enclave(costs.encrypt_cost(tx.call.encoded_size()));
  auto payload = tm_.distribute(tx.call, group, payload_rng_);
  ledger::Transaction pub = tx;
  pub.call = ledger::Call{};
  pub.private_payload = payload.payload_hash;
  pub.privacy_group.reset();
  pub.submit_time = now();
  const auto members = group.members;
  defer(ready, [this, members, payload = std::move(payload), pub = std::move(pub)]() mutable {
    for (auto m : members) {
      if (m != id_) cluster_.send_payload(id_, m, payload);
    }
    engine_->on_client_tx(std::move(pub));
  });
}

void Node::on_read(ClientId client, std::uint64_t request_id, ledger::ContractAddress contract,
                   const std::string& key) {
  if (crashed_) return;
  ledger::ReadResult result;
  if (ledger_.contract(contract)) {
    result = ledger_.read(contract, key);
  } else if (const auto* pc = tm_.contract(contract)) {
    if (auto v = pc->find(key)) result = {*v, true};
  }
  cluster_.send_read_response(id_, client, now() + ledger_.costs().read_cost(), request_id, std::move(result));
}

void Node::on_peer_message(NodeId from, const consensus::Message& m) {
  if (!crashed_) engine_->on_message(from, m);
}

void Node::on_private_payload(privacy::EncryptedPayload payload) {
  if (crashed_) return;
  account_private(tm_.receive(std::move(payload)));
}

void Node::crash() { crashed_ = true; }

}  // namespace permledger::node
