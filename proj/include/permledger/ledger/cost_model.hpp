#pragma once

#include <cstdint>

#include "permledger/ledger/types.hpp"
#include "permledger/sim/time.hpp"

namespace permledger::ledger {

// Simulated CPU cost of contract execution, enclave cryptography and the
// block-event notification path. Member defaults are the calibrated values
// used by every preset; see README "Calibration".
struct CostModel {
  sim::Duration base = sim::micros(50);
  sim::Duration per_read = sim::micros(1);
  sim::Duration per_write = sim::micros(2);
  double per_byte_ns = 2900.0;
  double enc_per_byte_ns = 8500.0;
  double dec_per_byte_ns = 8500.0;
  // Fixed delay between a node committing a block and its event reaching the
  // subscribed listener, excluding network transfer.
  sim::Duration notify = sim::millis(340);

  // base + per_read * reads + per_write * writes + per_byte * payload_bytes.
  // store_size is accepted for interface symmetry and deliberately unused:
  // the store is hash indexed.
  sim::Duration execution_cost(Method method, std::uint64_t reads, std::uint64_t writes,
                               std::uint64_t store_size, std::uint64_t payload_bytes) const;

  // Cost of executing `call` against a contract that emits
  // `event_payload_size` bytes per invocation.
  sim::Duration call_cost(const Call& call, std::uint64_t store_size,
                          std::size_t event_payload_size) const;

  sim::Duration read_cost() const { return base + per_read; }
  sim::Duration encrypt_cost(std::size_t bytes) const;
  sim::Duration decrypt_cost(std::size_t bytes) const;
};

}  // namespace permledger::ledger
