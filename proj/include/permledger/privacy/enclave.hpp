#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "permledger/ledger/types.hpp"
#include "permledger/sim/rng.hpp"

namespace permledger::privacy {

using ledger::Hash256;
using ledger::NodeId;

using PublicKey = std::array<std::uint8_t, 32>;

struct EncryptedPayload {
  NodeId sender = 0;
  std::vector<std::uint8_t> nonce;
  // AEAD ciphertext including its authentication tag.
  std::vector<std::uint8_t> ciphertext;
  std::vector<std::uint8_t> key_nonce;
  // Per-member box of the payload key.
  std::map<NodeId, std::vector<std::uint8_t>> wrapped_keys;
  Hash256 payload_hash{};  // sha256(ciphertext)

  std::size_t wire_size() const;
};

// Holds a node's box keypair. The secret key never leaves this object; the
// interface only seals and opens payloads.
class Enclave {
 public:
  // The keypair is derived from (seed, node) so runs are reproducible.
  Enclave(NodeId node, std::uint64_t seed);
  Enclave(const Enclave&) = delete;
  Enclave& operator=(const Enclave&) = delete;
  ~Enclave();

  NodeId node() const { return node_; }
  const PublicKey& public_key() const { return public_key_; }

  // Encrypts `plaintext` under a fresh symmetric key drawn from `rng` and
  // wraps that key for every recipient (include the sender to keep a copy).
  EncryptedPayload seal(std::span<const std::uint8_t> plaintext, const std::map<NodeId, PublicKey>& recipients,
                        sim::Rng& rng) const;

  // Nothing if this node has no wrapped key or authentication fails.
  std::optional<std::vector<std::uint8_t>> open(const EncryptedPayload& payload, const PublicKey& sender_key) const;

 private:
  const std::array<std::uint8_t, 32>& shared_key(const PublicKey& peer) const;

  NodeId node_;
  PublicKey public_key_{};
  std::array<std::uint8_t, 32> secret_key_{};
  // Precomputed box keys per peer public key.
  mutable std::map<PublicKey, std::array<std::uint8_t, 32>> shared_;
};

}  // namespace permledger::privacy
