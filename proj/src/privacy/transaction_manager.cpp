#include "permledger/privacy/transaction_manager.hpp"

#include <algorithm>
#include <stdexcept>

namespace permledger::privacy {

Hash256 group_id(std::vector<NodeId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  ledger::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(members.size()));
  for (auto m : members) w.u32(m);
  return ledger::sha256(w.data());
}

PrivacyGroup PrivacyGroup::make(std::vector<NodeId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) throw std::invalid_argument("privacy group needs at least two members");
  PrivacyGroup g;
  g.id = group_id(members);
  g.members = std::move(members);
  return g;
}

bool PrivacyGroup::contains(NodeId node) const { return std::binary_search(members.begin(), members.end(), node); }

const char* private_outcome_name(PrivateOutcome o) {
  switch (o) {
    case PrivateOutcome::Applied: return "applied";
    case PrivateOutcome::Skipped: return "skipped";
    case PrivateOutcome::Deferred: return "deferred";
    case PrivateOutcome::Failed: return "failed";
  }
  return "unknown";
}

PrivacyOverhead privacy_overhead(std::size_t payload_bytes, std::size_t group_size, const ledger::CostModel& costs,
                                 const sim::NetworkModel& link) {
  if (group_size < 2) return {};
  constexpr std::size_t kAeadTag = 16;
  PrivacyOverhead o;
  o.sender = costs.encrypt_cost(payload_bytes) +
             static_cast<std::int64_t>(group_size - 1) * sim::net_delay(payload_bytes + kAeadTag, link);
  o.member = costs.decrypt_cost(payload_bytes);
  return o;
}

TransactionManager::TransactionManager(NodeId self, const Enclave& enclave, const Directory& directory,
                                       ledger::CostModel costs)
    : self_(self), enclave_(enclave), directory_(directory), costs_(costs) {}

void TransactionManager::add_contract(PrivacyGroup group, ledger::ContractState state) {
  if (!group.contains(self_)) throw std::invalid_argument("node is not a member of the contract's privacy group");
  const auto addr = state.address();
  contracts_.insert_or_assign(addr, std::make_pair(std::move(group), std::move(state)));
}

const PrivacyGroup* TransactionManager::group_of(ContractAddress address) const {
  auto it = contracts_.find(address);
  return it == contracts_.end() ? nullptr : &it->second.first;
}

ledger::ContractState* TransactionManager::contract(ContractAddress address) {
  auto it = contracts_.find(address);
  return it == contracts_.end() ? nullptr : &it->second.second;
}

const ledger::ContractState* TransactionManager::contract(ContractAddress address) const {
  auto it = contracts_.find(address);
  return it == contracts_.end() ? nullptr : &it->second.second;
}

EncryptedPayload TransactionManager::distribute(const ledger::Call& call, const PrivacyGroup& group, sim::Rng& rng) {
  if (!group.contains(self_)) throw std::invalid_argument("sender is not a member of the privacy group");
  Directory recipients;
  for (auto m : group.members) recipients.emplace(m, directory_.at(m));
  auto payload = enclave_.seal(call.encode(), recipients, rng);
  store_.emplace(payload.payload_hash, payload);
  return payload;
}

std::vector<PrivateExecution> TransactionManager::receive(EncryptedPayload payload) {
  std::vector<PrivateExecution> out;
  const auto hash = payload.payload_hash;
  store_.emplace(hash, std::move(payload));
  for (auto& [addr, queue] : deferred_) {
    if (!queue.empty() && *queue.front().private_payload == hash) drain_deferred(addr, out);
  }
  return out;
}

std::vector<PrivateExecution> TransactionManager::execute(const Transaction& tx) {
  std::vector<PrivateExecution> out;
  if (!contracts_.contains(tx.contract)) {
    skipped_.insert(tx.id);
    out.push_back({tx.id, PrivateOutcome::Skipped, {}});
    return out;
  }
  auto& queue = deferred_[tx.contract];
  queue.push_back(tx);
  drain_deferred(tx.contract, out);
  if (!queue.empty() && queue.back().id == tx.id) out.push_back({tx.id, PrivateOutcome::Deferred, {}});
  return out;
}

void TransactionManager::drain_deferred(ContractAddress address, std::vector<PrivateExecution>& out) {
  auto& queue = deferred_[address];
  while (!queue.empty()) {
    auto it = store_.find(*queue.front().private_payload);
    if (it == store_.end()) return;
    out.push_back(run(queue.front(), it->second));
    queue.pop_front();
  }
}

PrivateExecution TransactionManager::run(const Transaction& tx, const EncryptedPayload& payload) {
  PrivateExecution r{tx.id, PrivateOutcome::Failed, {}};
  auto sender = directory_.find(payload.sender);
  const auto plain_bytes = payload.ciphertext.size() >= 16 ? payload.ciphertext.size() - 16 : 0;
  r.cost = costs_.decrypt_cost(plain_bytes);
  // The hash on chain must name exactly this ciphertext.
  if (sender == directory_.end() || ledger::sha256(payload.ciphertext) != *tx.private_payload) {
    failed_.insert(tx.id);
    return r;
  }
  auto plain = enclave_.open(payload, sender->second);
  if (!plain) {
    failed_.insert(tx.id);
    return r;
  }
  ledger::Call call;
  try {
    call = ledger::Call::decode(*plain);
  } catch (const std::exception&) {
    failed_.insert(tx.id);
    return r;
  }
  auto& state = contracts_.at(tx.contract).second;
  r.cost += costs_.call_cost(call, state.size(), state.event_payload_size());
  state.execute(call);
  r.outcome = PrivateOutcome::Applied;
  return r;
}

std::size_t TransactionManager::deferred_count() const {
  std::size_t n = 0;
  for (const auto& [addr, q] : deferred_) n += q.size();
  return n;
}

}  // namespace permledger::privacy
