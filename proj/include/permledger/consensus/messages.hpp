#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "permledger/ledger/types.hpp"
#include "permledger/sim/network.hpp"

namespace permledger::consensus {

using ledger::BlockPtr;
using ledger::Hash256;
using ledger::NodeId;
using ledger::Transaction;

// A RAFT log entry. A null block is the no-op a new leader appends.
struct LogEntry {
  std::uint64_t term = 0;
  BlockPtr block;
};

struct AppendEntries {
  std::uint64_t term = 0;
  NodeId leader = 0;
  std::uint64_t prev_index = 0;
  std::uint64_t prev_term = 0;
  std::vector<LogEntry> entries;
  std::uint64_t leader_commit = 0;
};

struct AppendResponse {
  std::uint64_t term = 0;
  bool success = false;
  // Last matching index on success; the follower's last log index on reject.
  std::uint64_t match_index = 0;
  bool heartbeat = false;
};

struct RequestVote {
  std::uint64_t term = 0;
  NodeId candidate = 0;
  std::uint64_t last_index = 0;
  std::uint64_t last_term = 0;
};

struct VoteResponse {
  std::uint64_t term = 0;
  bool granted = false;
};

struct ForwardTx {
  Transaction tx;
};

struct PrePrepare {
  std::uint64_t height = 0;
  std::uint64_t round = 0;
  BlockPtr block;
};

struct Prepare {
  std::uint64_t height = 0;
  std::uint64_t round = 0;
  Hash256 hash{};
};

struct Commit {
  std::uint64_t height = 0;
  std::uint64_t round = 0;
  Hash256 hash{};
};

struct RoundChange {
  std::uint64_t height = 0;
  std::uint64_t round = 0;
};

struct BlockRequest {
  std::uint64_t height = 0;
  Hash256 hash{};
};

struct BlockResponse {
  BlockPtr block;
};

struct TxGossip {
  Transaction tx;
};

using Message = std::variant<AppendEntries, AppendResponse, RequestVote, VoteResponse, ForwardTx, PrePrepare, Prepare,
                             Commit, RoundChange, BlockRequest, BlockResponse, TxGossip>;

std::size_t wire_size(const Message& m);
sim::Traffic traffic_kind(const Message& m);
const char* message_name(const Message& m);

}  // namespace permledger::consensus
