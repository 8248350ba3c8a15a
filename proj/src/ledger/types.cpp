#include "permledger/ledger/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace permledger::ledger {

namespace {

constexpr std::uint32_t kPrivateSelector = 0xFFFFFFFFu;

void word_u64(ByteWriter& w, std::uint64_t v) {
  w.u64(v);
  for (int i = 0; i < 24; ++i) w.u8(0);
}

std::uint64_t read_word_u64(ByteReader& r) {
  const auto v = r.u64();
  r.raw(24);
  return v;
}

void word_str(ByteWriter& w, const std::string& s) {
  if (s.size() > kMaxWordBytes) throw std::invalid_argument("call argument exceeds 32 bytes");
  w.raw(s);
  for (std::size_t i = s.size(); i < kMaxWordBytes; ++i) w.u8(0);
}

std::string read_word_str(ByteReader& r) {
  auto b = r.raw(kMaxWordBytes);
  auto end = std::find(b.begin(), b.end(), std::uint8_t{0});
  return std::string(b.begin(), end);
}

constexpr std::size_t kTxFixedBytes = 32 + 4 + 8 + 4;  // id, sender, contract, call-data length

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::NullOp: return "null";
    case Method::Write: return "write";
    case Method::ReadWriteSet: return "rwset";
  }
  return "unknown";
}

std::size_t Call::encoded_size() const {
  std::size_t n = 4;
  if (method == Method::Write || method == Method::ReadWriteSet) n += 64;
  return n + 32 + pad32(payload.size());
}

std::vector<std::uint8_t> Call::encode() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(method));
  switch (method) {
    case Method::Write:
      word_str(w, key);
      word_str(w, value);
      break;
    case Method::ReadWriteSet:
      word_u64(w, reads);
      word_u64(w, writes);
      break;
    case Method::NullOp:
      break;
  }
  word_u64(w, payload.size());
  w.padded(payload);
  return w.take();
}

Call Call::decode(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  Call c;
  const auto selector = r.u32();
  if (selector > static_cast<std::uint32_t>(Method::ReadWriteSet)) {
    throw std::invalid_argument("unknown method selector");
  }
  c.method = static_cast<Method>(selector);
  if (c.method == Method::Write) {
    c.key = read_word_str(r);
    c.value = read_word_str(r);
  } else if (c.method == Method::ReadWriteSet) {
    c.reads = read_word_u64(r);
    c.writes = read_word_u64(r);
  }
  const auto len = read_word_u64(r);
  if (len > kMaxPayloadBytes) throw std::invalid_argument("payload length out of range");
  auto p = r.padded(static_cast<std::size_t>(len));
  c.payload.assign(p.begin(), p.end());
  if (!r.done()) throw std::invalid_argument("trailing call data");
  return c;
}

std::size_t Transaction::call_data_size() const {
  return is_private() ? 4 + 32 : call.encoded_size();
}

void Transaction::encode(ByteWriter& w) const {
  w.raw(id);
  w.u32(sender);
  w.u64(contract);
  w.u32(static_cast<std::uint32_t>(call_data_size()));
  if (is_private()) {
    w.u32(kPrivateSelector);
    w.raw(*private_payload);
  } else {
    w.raw(call.encode());
  }
}

std::size_t Transaction::encoded_size() const { return kTxFixedBytes + call_data_size(); }

std::size_t Transaction::wire_size() const {
  std::size_t n = encoded_size();
  if (privacy_group) n += 4 + 4 * privacy_group->size();
  return n;
}

void Block::encode_header_and_body(ByteWriter& w) const {
  w.u64(height);
  w.raw(parent_hash);
  w.u32(proposer);
  w.i64(timestamp.time_since_epoch().count());
  w.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) tx.encode(w);
}

Hash256 Block::compute_hash() const {
  ByteWriter w;
  encode_header_and_body(w);
  return sha256(w.data());
}

std::vector<std::uint8_t> Block::serialize() const {
  ByteWriter w;
  encode_header_and_body(w);
  w.raw(hash);
  return w.take();
}

std::size_t Block::wire_size() const {
  std::size_t n = 8 + 32 + 4 + 8 + 4 + 32;
  for (const auto& tx : txs) n += tx.encoded_size();
  return n;
}

BlockPtr genesis_block() {
  auto g = std::make_shared<Block>();
  g->seal();
  return g;
}

std::size_t BlockEvent::wire_size() const {
  return 8 + 32 + 4 + per_tx.size() * 32 + event_payload_bytes;
}

}  // namespace permledger::ledger
