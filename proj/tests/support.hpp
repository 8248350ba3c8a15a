#pragma once

#include <map>
#include <memory>
#include <vector>

#include "permledger/consensus/engine.hpp"
#include "permledger/ledger/ledger.hpp"
#include "permledger/node/cluster.hpp"

namespace permledger::testing {

inline ledger::TxId make_id(std::uint64_t n, std::uint64_t salt = 0) {
  ledger::ByteWriter w;
  w.u64(n);
  w.u64(salt);
  return ledger::sha256(w.data());
}

inline ledger::Transaction write_tx(std::uint64_t n, ledger::ContractAddress contract, const std::string& key,
                                    const std::string& value, ledger::ClientId sender = 0) {
  ledger::Transaction tx;
  tx.id = make_id(n, sender);
  tx.sender = sender;
  tx.contract = contract;
  tx.call.method = ledger::Method::Write;
  tx.call.key = key;
  tx.call.value = value;
  return tx;
}

// Drives one engine by hand: records what it sends and schedules.
class MockContext final : public consensus::NodeContext {
 public:
  MockContext(ledger::NodeId id, std::uint32_t n)
      : id_(id), n_(n), ledger_(id, ledger::CostModel{}), rng_(sim::Rng::stream(1, id)) {
    ledger::ContractState c(1, ledger::Visibility::Public, std::nullopt, 0);
    c.preload(10, 1);
    ledger_.add_contract(std::move(c));
  }

  ledger::NodeId self() const override { return id_; }
  std::uint32_t cluster_size() const override { return n_; }
  sim::SimTime now() const override { return now_; }
  ledger::Ledger& ledger() override { return ledger_; }
  sim::Rng& rng() override { return rng_; }
  void send(ledger::NodeId to, consensus::Message m) override { sent.emplace_back(to, std::move(m)); }
  void broadcast(const consensus::Message& m) override {
    for (ledger::NodeId i = 0; i < n_; ++i) {
      if (i != id_) sent.emplace_back(i, m);
    }
  }
  void set_timer(sim::Duration delay, std::uint64_t token) override { timers.emplace_back(delay, token); }
  void defer(sim::SimTime, std::function<void()> fn) override { fn(); }
  sim::SimTime execute(const consensus::BlockPtr&) override { return now_; }
  bool commit(const consensus::BlockPtr& block) override {
    const bool ok = ledger_.apply_block(block, now_).ok;
    if (ok) committed.push_back(block);
    return ok;
  }

  template <class T>
  std::vector<std::pair<ledger::NodeId, T>> sent_of() const {
    std::vector<std::pair<ledger::NodeId, T>> out;
    for (const auto& [to, m] : sent) {
      if (const auto* p = std::get_if<T>(&m)) out.emplace_back(to, *p);
    }
    return out;
  }

  void advance(sim::Duration d) { now_ += d; }

  std::vector<std::pair<ledger::NodeId, consensus::Message>> sent;
  std::vector<std::pair<sim::Duration, std::uint64_t>> timers;
  std::vector<consensus::BlockPtr> committed;

 private:
  ledger::NodeId id_;
  std::uint32_t n_;
  sim::SimTime now_{};
  ledger::Ledger ledger_;
  sim::Rng rng_;
};

// Records everything a cluster sends back to one client.
class RecordingSink final : public node::ClientSink {
 public:
  void on_ack(const ledger::TxId& tx, ledger::SubmitError error) override { acks.emplace_back(tx, error); }
  void on_block_event(const std::shared_ptr<const ledger::BlockEvent>& event) override {
    events.push_back(event);
    for (const auto& c : event->per_tx) ++confirmations[c.tx_id];
  }
  void on_read_response(std::uint64_t request_id, const ledger::ReadResult& result) override {
    reads[request_id] = result;
  }

  std::vector<std::pair<ledger::TxId, ledger::SubmitError>> acks;
  std::vector<std::shared_ptr<const ledger::BlockEvent>> events;
  std::map<ledger::TxId, int> confirmations;
  std::map<std::uint64_t, ledger::ReadResult> reads;
};

}  // namespace permledger::testing
