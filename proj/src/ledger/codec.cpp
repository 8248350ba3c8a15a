#include "permledger/ledger/codec.hpp"

#include <sodium.h>

#include <stdexcept>

namespace permledger::ledger {

Hash256 sha256(std::span<const std::uint8_t> data) {
  Hash256 out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

std::string short_hex(const Hash256& h) { return to_hex(std::span(h).first(6)); }

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

void ByteWriter::bytes(std::span<const std::uint8_t> b) {
  u32(static_cast<std::uint32_t>(b.size()));
  raw(b);
}

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s);
}

void ByteWriter::padded(std::span<const std::uint8_t> b) {
  raw(b);
  out_.resize(out_.size() + (pad32(b.size()) - b.size()), 0);
}

void ByteWriter::padded(std::string_view s) {
  raw(s);
  out_.resize(out_.size() + (pad32(s.size()) - s.size()), 0);
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (in_.size() - pos_ < n) throw std::out_of_range("ByteReader: truncated input");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::span<const std::uint8_t> ByteReader::padded(std::size_t n) {
  auto out = raw(n);
  raw(pad32(n) - n);
  return out;
}

}  // namespace permledger::ledger
