#include "permledger/ledger/contract.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

#include "permledger/sim/rng.hpp"

namespace permledger::ledger {

std::string preload_key(std::uint64_t index) { return "k" + std::to_string(index); }

std::string preload_value(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (index * 0xD1B54A32D192ED03ULL);
  std::array<std::uint8_t, 16> bytes{};
  for (int half = 0; half < 2; ++half) {
    std::uint64_t v = sim::splitmix64(state);
    for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(half * 8 + i)] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  return to_hex(bytes);
}

Hash256 slot_of(const std::string& key) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(key.data()), key.size()));
}

namespace {

// A fresh 32-character value for the i-th entry of a write set.
std::string written_value(std::uint64_t i) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string v(32, 'w');
  for (int d = 0; d < 16; ++d) v[31 - d] = kHex[(i >> (4 * d)) & 0xF];
  return v;
}

}  // namespace

ContractState::ContractState(ContractAddress address, Visibility visibility,
                             std::optional<Hash256> group_id, std::size_t event_payload_size)
    : address_(address),
      visibility_(visibility),
      group_id_(group_id),
      event_payload_size_(event_payload_size) {}

void ContractState::preload(std::uint64_t count, std::uint64_t seed) {
  store_.reserve(store_.size() + count);
  for (std::uint64_t i = 0; i < count; ++i) set(preload_key(i), preload_value(seed, i));
}

void ContractState::set(const std::string& key, const std::string& value) {
  if (value.size() > kMaxWordBytes) throw std::invalid_argument("value exceeds 32 bytes");
  auto& w = store_[slot_of(key)];
  std::copy(value.begin(), value.end(), w.bytes.begin());
  w.size = static_cast<std::uint8_t>(value.size());
}

std::optional<std::string> ContractState::find(const std::string& key) const {
  auto it = store_.find(slot_of(key));
  if (it == store_.end()) return std::nullopt;
  return std::string(it->second.bytes.data(), it->second.size);
}

std::string ContractState::get(const std::string& key) const { return find(key).value_or(std::string{}); }

void ContractState::put(const std::string& key, const std::string& value) { set(key, value); }

ExecOutcome ContractState::execute(const Call& call) {
  switch (call.method) {
    case Method::NullOp:
      return {};
    case Method::Write:
      set(call.key, call.value);
      return {0, 1};
    case Method::ReadWriteSet: {
      const std::uint64_t n = std::max<std::uint64_t>(store_.size(), 1);
      std::size_t checksum = 0;
      for (std::uint64_t i = 0; i < call.reads; ++i) {
        auto it = store_.find(slot_of(preload_key(i % n)));
        if (it != store_.end()) checksum += it->second.size;
      }
      for (std::uint64_t i = 0; i < call.writes; ++i) {
        set(preload_key(i), call.value.empty() ? written_value(i) : call.value);
      }
      (void)checksum;
      return {call.reads, call.writes};
    }
  }
  return {};
}

Hash256 ContractState::digest() const {
  std::vector<const std::pair<const Hash256, Word>*> sorted;
  sorted.reserve(store_.size());
  for (const auto& kv : store_) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
  ByteWriter w;
  w.u64(address_);
  for (const auto* kv : sorted) {
    w.raw(kv->first);
    w.str(std::string(kv->second.bytes.data(), kv->second.size));
  }
  return sha256(w.data());
}

}  // namespace permledger::ledger
