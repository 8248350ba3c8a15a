#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "permledger/ledger/codec.hpp"
#include "permledger/sim/time.hpp"

namespace permledger::ledger {

using NodeId = std::uint32_t;
using ClientId = std::uint32_t;
using ContractAddress = std::uint64_t;
using TxId = Hash256;

inline constexpr std::size_t kMaxPayloadBytes = 32768;
inline constexpr std::size_t kMaxWordBytes = 32;

enum class Method : std::uint8_t {
  NullOp = 0,
  Write = 1,
  // Benchmark method: `reads` lookups followed by `writes` updates.
  ReadWriteSet = 2,
};

const char* method_name(Method m);

// A decoded contract invocation. This is also the plaintext of a private
// transaction.
struct Call {
  Method method = Method::NullOp;
  std::string key;
  std::string value;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::vector<std::uint8_t> payload;

  // 4-byte selector, fixed 32-byte argument words, then a length word and
  // the padded payload.
  std::vector<std::uint8_t> encode() const;
  std::size_t encoded_size() const;
  // Throws std::invalid_argument / std::out_of_range on malformed input.
  static Call decode(std::span<const std::uint8_t> data);

  bool operator==(const Call&) const = default;
};

struct Transaction {
  TxId id{};
  ClientId sender = 0;
  NodeId origin = 0;  // node that accepted it from the client; not on chain
  ContractAddress contract = 0;
  Call call;
  // Requested privacy group. Cleared on the public form.
  std::optional<std::vector<NodeId>> privacy_group;
  // Set on the public form of a private transaction; the call is then empty.
  std::optional<Hash256> private_payload;
  sim::SimTime submit_time{};

  bool is_private() const { return private_payload.has_value(); }
  std::size_t call_data_size() const;
  // Canonical on-chain encoding: id, sender, contract, call data.
  void encode(ByteWriter& w) const;
  std::size_t encoded_size() const;
  // Size of the client submission message.
  std::size_t wire_size() const;
};

struct Block {
  std::uint64_t height = 0;
  Hash256 parent_hash{};
  NodeId proposer = 0;
  sim::SimTime timestamp{};
  std::vector<Transaction> txs;
  Hash256 hash{};

  Hash256 compute_hash() const;
  void seal() { hash = compute_hash(); }
  bool verify_hash() const { return hash == compute_hash(); }
  // Header and transactions followed by the block hash.
  std::vector<std::uint8_t> serialize() const;
  std::size_t wire_size() const;

 private:
  void encode_header_and_body(ByteWriter& w) const;
};

using BlockPtr = std::shared_ptr<const Block>;

BlockPtr genesis_block();

struct TxConfirmation {
  TxId tx_id{};
  sim::SimTime confirm_time{};
};

// Emitted once per (node, committed block).
struct BlockEvent {
  NodeId node = 0;
  BlockPtr block;
  std::vector<TxConfirmation> per_tx;
  std::size_t event_payload_bytes = 0;

  std::size_t wire_size() const;
};

}  // namespace permledger::ledger
