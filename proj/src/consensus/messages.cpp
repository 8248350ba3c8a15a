#include "permledger/consensus/messages.hpp"

namespace permledger::consensus {

namespace {

constexpr std::size_t kHeader = 16;  // type tag, sender, framing

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t wire_size(const Message& m) {
  return kHeader + std::visit(Overloaded{
                                  [](const AppendEntries& a) {
                                    std::size_t n = 8 + 4 + 8 + 8 + 8 + 4;
                                    for (const auto& e : a.entries) n += 8 + (e.block ? e.block->wire_size() : 0);
                                    return n;
                                  },
                                  [](const AppendResponse&) -> std::size_t { return 8 + 1 + 8; },
                                  [](const RequestVote&) -> std::size_t { return 8 + 4 + 8 + 8; },
                                  [](const VoteResponse&) -> std::size_t { return 8 + 1; },
                                  [](const ForwardTx& f) { return f.tx.wire_size(); },
                                  [](const PrePrepare& p) { return 16 + p.block->wire_size(); },
                                  [](const Prepare&) -> std::size_t { return 16 + 32; },
                                  [](const Commit&) -> std::size_t { return 16 + 32 + 65; },  // committed seal
                                  [](const RoundChange&) -> std::size_t { return 16; },
                                  [](const BlockRequest&) -> std::size_t { return 8 + 32; },
                                  [](const BlockResponse& b) { return b.block->wire_size(); },
                                  [](const TxGossip& g) { return g.tx.wire_size(); },
                              },
                              m);
}

sim::Traffic traffic_kind(const Message& m) {
  return std::visit(Overloaded{
                        [](const AppendEntries& a) {
                          return a.entries.empty() ? sim::Traffic::Heartbeat : sim::Traffic::Consensus;
                        },
                        [](const AppendResponse& r) {
                          return r.heartbeat ? sim::Traffic::Heartbeat : sim::Traffic::Consensus;
                        },
                        [](const ForwardTx&) { return sim::Traffic::Gossip; },
                        [](const TxGossip&) { return sim::Traffic::Gossip; },
                        [](const auto&) { return sim::Traffic::Consensus; },
                    },
                    m);
}

const char* message_name(const Message& m) {
  static constexpr const char* kNames[] = {"AppendEntries", "AppendResponse", "RequestVote", "VoteResponse",
                                           "ForwardTx",     "PrePrepare",     "Prepare",     "Commit",
                                           "RoundChange",   "BlockRequest",   "BlockResponse", "TxGossip"};
  return kNames[m.index()];
}

}  // namespace permledger::consensus
