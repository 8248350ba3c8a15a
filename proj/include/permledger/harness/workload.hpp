#pragma once

#include <string>
#include <variant>

#include "permledger/harness/config.hpp"
#include "permledger/ledger/types.hpp"
#include "permledger/sim/rng.hpp"

namespace permledger::harness {

struct ReadRequest {
  ledger::ContractAddress contract = 0;
  std::string key;
};

using Request = std::variant<ledger::Transaction, ReadRequest>;

// Unique, deterministic transaction id for the seq-th request of a client.
ledger::TxId make_tx_id(ledger::ClientId client, std::uint64_t seq, std::uint64_t seed);

// Draws one request. Keys are uniform over [0, key_space). Throws
// std::invalid_argument when key_space is zero.
Request generate_tx(const WorkloadSpec& spec, ledger::ContractAddress contract, ledger::ClientId client,
                    std::uint64_t seq, std::uint64_t seed, sim::Rng& rng,
                    const std::optional<PrivacySpec>& privacy = std::nullopt);

}  // namespace permledger::harness
