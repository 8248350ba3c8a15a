#include "permledger/privacy/enclave.hpp"

#include <sodium.h>

#include <stdexcept>

namespace permledger::privacy {

namespace {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

static_assert(crypto_box_PUBLICKEYBYTES == 32 && crypto_box_SECRETKEYBYTES == 32 && crypto_box_BEFORENMBYTES == 32);

}  // namespace

std::size_t EncryptedPayload::wire_size() const {
  std::size_t n = 4 + nonce.size() + ciphertext.size() + key_nonce.size() + 32;
  for (const auto& [node, key] : wrapped_keys) n += 4 + key.size();
  return n;
}

Enclave::Enclave(NodeId node, std::uint64_t seed) : node_(node) {
  ensure_sodium();
  ledger::ByteWriter w;
  w.raw(std::string_view("permledger-enclave"));
  w.u64(seed);
  w.u32(node);
  const auto key_seed = ledger::sha256(w.data());
  crypto_box_seed_keypair(public_key_.data(), secret_key_.data(), key_seed.data());
}

Enclave::~Enclave() {
  sodium_memzero(secret_key_.data(), secret_key_.size());
  for (auto& [pk, k] : shared_) sodium_memzero(k.data(), k.size());
}

const std::array<std::uint8_t, 32>& Enclave::shared_key(const PublicKey& peer) const {
  auto it = shared_.find(peer);
  if (it == shared_.end()) {
    std::array<std::uint8_t, 32> k{};
    if (crypto_box_beforenm(k.data(), peer.data(), secret_key_.data()) != 0) {
      throw std::invalid_argument("invalid peer public key");
    }
    it = shared_.emplace(peer, k).first;
  }
  return it->second;
}

EncryptedPayload Enclave::seal(std::span<const std::uint8_t> plaintext, const std::map<NodeId, PublicKey>& recipients,
                               sim::Rng& rng) const {
  EncryptedPayload out;
  out.sender = node_;
  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> key{};
  rng.fill(key);
  out.nonce.resize(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES);
  rng.fill(out.nonce);
  out.ciphertext.resize(plaintext.size() + crypto_aead_xchacha20poly1305_ietf_ABYTES);
  unsigned long long clen = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(out.ciphertext.data(), &clen, plaintext.data(), plaintext.size(),
                                             nullptr, 0, nullptr, out.nonce.data(), key.data());
  out.ciphertext.resize(clen);
  out.payload_hash = ledger::sha256(out.ciphertext);

  out.key_nonce.resize(crypto_box_NONCEBYTES);
  rng.fill(out.key_nonce);
  for (const auto& [member, pk] : recipients) {
    std::vector<std::uint8_t> boxed(key.size() + crypto_box_MACBYTES);
    crypto_box_easy_afternm(boxed.data(), key.data(), key.size(), out.key_nonce.data(), shared_key(pk).data());
    out.wrapped_keys.emplace(member, std::move(boxed));
  }
  sodium_memzero(key.data(), key.size());
  return out;
}

std::optional<std::vector<std::uint8_t>> Enclave::open(const EncryptedPayload& payload,
                                                       const PublicKey& sender_key) const {
  auto it = payload.wrapped_keys.find(node_);
  if (it == payload.wrapped_keys.end() || it->second.size() < crypto_box_MACBYTES ||
      payload.key_nonce.size() != crypto_box_NONCEBYTES ||
      payload.nonce.size() != crypto_aead_xchacha20poly1305_ietf_NPUBBYTES ||
      payload.ciphertext.size() < crypto_aead_xchacha20poly1305_ietf_ABYTES) {
    return std::nullopt;
  }
  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> key{};
  if (it->second.size() != key.size() + crypto_box_MACBYTES ||
      crypto_box_open_easy_afternm(key.data(), it->second.data(), it->second.size(), payload.key_nonce.data(),
                                   shared_key(sender_key).data()) != 0) {
    return std::nullopt;
  }
  std::vector<std::uint8_t> plain(payload.ciphertext.size() - crypto_aead_xchacha20poly1305_ietf_ABYTES);
  unsigned long long plen = 0;
  const int rc = crypto_aead_xchacha20poly1305_ietf_decrypt(plain.data(), &plen, nullptr, payload.ciphertext.data(),
                                                            payload.ciphertext.size(), nullptr, 0,
                                                            payload.nonce.data(), key.data());
  sodium_memzero(key.data(), key.size());
  if (rc != 0) return std::nullopt;
  plain.resize(plen);
  return plain;
}

}  // namespace permledger::privacy
