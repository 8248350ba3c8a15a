#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <absl/container/flat_hash_map.h>

#include "permledger/ledger/types.hpp"

namespace permledger::ledger {

enum class Visibility : std::uint8_t { Public, Private };

// Deterministic pre-load entries: key "k<i>", 32-character value derived
// from (seed, i).
std::string preload_key(std::uint64_t index);
std::string preload_value(std::uint64_t seed, std::uint64_t index);

struct ExecOutcome {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
};

// Storage slot of a mapping key, as a contract mapping derives it.
Hash256 slot_of(const std::string& key);

// The benchmark key-value contract. Values are single words stored at
// slot_of(key); longer values are rejected with std::invalid_argument.
class ContractState {
 public:
  ContractState(ContractAddress address, Visibility visibility, std::optional<Hash256> group_id,
                std::size_t event_payload_size);

  // Fills entries k0 .. k<count-1>.
  void preload(std::uint64_t count, std::uint64_t seed);

  ContractAddress address() const { return address_; }
  Visibility visibility() const { return visibility_; }
  const std::optional<Hash256>& group_id() const { return group_id_; }
  std::size_t event_payload_size() const { return event_payload_size_; }
  std::size_t size() const { return store_.size(); }

  // Missing keys read as the empty value.
  std::string get(const std::string& key) const;
  bool contains(const std::string& key) const { return store_.contains(slot_of(key)); }
  std::optional<std::string> find(const std::string& key) const;
  void put(const std::string& key, const std::string& value);

  ExecOutcome execute(const Call& call);

  // Order-independent digest of the store contents.
  Hash256 digest() const;

 private:
  ContractAddress address_;
  Visibility visibility_;
  std::optional<Hash256> group_id_;
  std::size_t event_payload_size_;
  struct Word {
    std::array<char, kMaxWordBytes> bytes{};
    std::uint8_t size = 0;
  };
  void set(const std::string& key, const std::string& value);

  absl::flat_hash_map<Hash256, Word, Hash256Hasher> store_;
};

}  // namespace permledger::ledger
