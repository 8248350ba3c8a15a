#include "permledger/harness/workload.hpp"

#include <stdexcept>

#include "permledger/ledger/contract.hpp"

namespace permledger::harness {

ledger::TxId make_tx_id(ledger::ClientId client, std::uint64_t seq, std::uint64_t seed) {
  ledger::ByteWriter w;
  w.u64(seed);
  w.u32(client);
  w.u64(seq);
  return ledger::sha256(w.data());
}

Request generate_tx(const WorkloadSpec& spec, ledger::ContractAddress contract, ledger::ClientId client,
                    std::uint64_t seq, std::uint64_t seed, sim::Rng& rng, const std::optional<PrivacySpec>& privacy) {
  if (spec.key_space == 0) throw std::invalid_argument("key_space must be positive");
  auto kind = spec.kind;
  if (kind == WorkloadKind::Mix50) kind = rng.coin(0.5) ? WorkloadKind::Read : WorkloadKind::Write;
  if (kind == WorkloadKind::Read) return ReadRequest{contract, ledger::preload_key(rng.below(spec.key_space))};

  ledger::Transaction tx;
  tx.id = make_tx_id(client, seq, seed);
  tx.sender = client;
  tx.contract = contract;
  switch (kind) {
    case WorkloadKind::Write: {
      tx.call.method = ledger::Method::Write;
      tx.call.key = ledger::preload_key(rng.below(spec.key_space));
      tx.call.value = ledger::preload_value(rng.next(), seq);
      break;
    }
    case WorkloadKind::ReadWriteSet:
      tx.call.method = ledger::Method::ReadWriteSet;
      tx.call.reads = spec.reads;
      tx.call.writes = spec.writes;
      break;
    default:
      tx.call.method = ledger::Method::NullOp;
      break;
  }
  if (spec.payload_size > 0) {
    tx.call.payload.resize(spec.payload_size);
    rng.fill(tx.call.payload);
  }
  if (privacy) tx.privacy_group = privacy->group;
  return tx;
}

}  // namespace permledger::harness
