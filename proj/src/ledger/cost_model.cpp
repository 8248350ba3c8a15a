#include "permledger/ledger/cost_model.hpp"

#include <cmath>

namespace permledger::ledger {

sim::Duration CostModel::execution_cost(Method /*method*/, std::uint64_t reads, std::uint64_t writes,
                                        std::uint64_t /*store_size*/, std::uint64_t payload_bytes) const {
  return base + per_read * static_cast<std::int64_t>(reads) + per_write * static_cast<std::int64_t>(writes) +
         sim::Duration{std::llround(per_byte_ns * static_cast<double>(payload_bytes))};
}

sim::Duration CostModel::call_cost(const Call& call, std::uint64_t store_size,
                                   std::size_t event_payload_size) const {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  switch (call.method) {
    case Method::NullOp: break;
    case Method::Write: writes = 1; break;
    case Method::ReadWriteSet:
      reads = call.reads;
      writes = call.writes;
      break;
  }
  return execution_cost(call.method, reads, writes, store_size, call.payload.size() + event_payload_size);
}

sim::Duration CostModel::encrypt_cost(std::size_t bytes) const {
  return sim::Duration{std::llround(enc_per_byte_ns * static_cast<double>(bytes))};
}

sim::Duration CostModel::decrypt_cost(std::size_t bytes) const {
  return sim::Duration{std::llround(dec_per_byte_ns * static_cast<double>(bytes))};
}

}  // namespace permledger::ledger
