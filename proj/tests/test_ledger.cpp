#include <doctest.h>

#include "permledger/ledger/contract.hpp"
#include "permledger/ledger/cost_model.hpp"
#include "permledger/ledger/ledger.hpp"
#include "permledger/ledger/mempool.hpp"

using namespace permledger;
using namespace permledger::ledger;
using sim::at_seconds;

namespace {

TxId tid(std::uint64_t n) {
  ByteWriter w;
  w.u64(n);
  return sha256(w.data());
}

Transaction write_tx(std::uint64_t n, const std::string& key, const std::string& value, ContractAddress c = 1) {
  Transaction tx;
  tx.id = tid(n);
  tx.contract = c;
  tx.call.method = Method::Write;
  tx.call.key = key;
  tx.call.value = value;
  return tx;
}

Transaction null_tx(std::uint64_t n, ContractAddress c = 1) {
  Transaction tx;
  tx.id = tid(n);
  tx.contract = c;
  return tx;
}

Ledger make_ledger(std::uint64_t entries = 10) {
  Ledger l(0, CostModel{});
  ContractState c(1, Visibility::Public, std::nullopt, 0);
  c.preload(entries, 42);
  l.add_contract(std::move(c));
  return l;
}

BlockPtr next_block(Ledger& l, std::size_t max = 4096, double t = 1.0) {
  auto b = l.make_block(*l.tip(), max, at_seconds(t), 0);
  REQUIRE(b.has_value());
  return std::make_shared<const Block>(std::move(*b));
}

}  // namespace

TEST_SUITE("ledger-core") {
  TEST_CASE("deploy: pre-loaded stores") {
    ContractState c(1, Visibility::Public, std::nullopt, 0);
    c.preload(1000, 42);
    CHECK(c.size() == 1000);
    ContractState empty(2, Visibility::Public, std::nullopt, 0);
    empty.preload(0, 42);
    CHECK(empty.size() == 0);
    ContractState big(3, Visibility::Public, std::nullopt, 0);
    big.preload(1'000'000, 42);
    CHECK(big.size() == 1'000'000);
    CHECK(big.contains(preload_key(0)));
    CHECK(big.contains(preload_key(999'999)));
    CHECK_FALSE(big.contains(preload_key(1'000'000)));
  }

  TEST_CASE("deploy: deterministic entries") {
    ContractState a(1, Visibility::Public, std::nullopt, 0), b(1, Visibility::Public, std::nullopt, 0);
    a.preload(100, 7);
    b.preload(100, 7);
    CHECK(a.digest() == b.digest());
    CHECK(a.get("k5") == preload_value(7, 5));
    CHECK(preload_value(7, 5).size() == 32);
  }

  TEST_CASE("submit: payload boundary") {
    auto l = make_ledger();
    auto tx = null_tx(1);
    tx.call.payload.resize(32768);
    CHECK(l.submit(tx, at_seconds(0)) == SubmitError::None);
    auto big = null_tx(2);
    big.call.payload.resize(32769);
    CHECK(l.submit(big, at_seconds(0)) == SubmitError::PayloadTooLarge);
    CHECK(l.mempool().size() == 1);
  }

  TEST_CASE("submit: unknown contract and duplicates") {
    auto l = make_ledger();
    CHECK(l.submit(null_tx(1, 99), at_seconds(0)) == SubmitError::UnknownContract);
    CHECK(l.submit(write_tx(1, "a", "x"), at_seconds(0)) == SubmitError::None);
    CHECK(l.submit(write_tx(1, "a", "y"), at_seconds(0)) == SubmitError::Duplicate);
    auto b = next_block(l);
    CHECK(b->txs.size() == 1);
    CHECK(b->txs[0].call.value == "x");
  }

  TEST_CASE("submit: stamps arrival time") {
    auto l = make_ledger();
    l.submit(null_tx(1), at_seconds(3));
    auto b = next_block(l);
    CHECK(b->txs[0].submit_time == at_seconds(3));
  }

  TEST_CASE("read: pre-loaded, written and missing keys") {
    auto l = make_ledger();
    auto r = l.read(1, "k3");
    CHECK(r.found);
    CHECK(r.value == preload_value(42, 3));
    auto missing = l.read(1, "nope");
    CHECK_FALSE(missing.found);
    CHECK(missing.value.empty());
    l.submit(write_tx(1, "k3", "new"), at_seconds(0));
    CHECK(l.apply_block(next_block(l), at_seconds(1)).ok);
    CHECK(l.read(1, "k3").value == "new");
  }

  TEST_CASE("read: does not change the chain") {
    auto l = make_ledger(1000);
    for (int i = 0; i < 1000; ++i) l.read(1, preload_key(static_cast<std::uint64_t>(i)));
    CHECK(l.height() == 0);
    CHECK(l.mempool().empty());
  }

  TEST_CASE("make_block: empty mempool gives nothing") {
    auto l = make_ledger();
    CHECK_FALSE(l.make_block(*l.tip(), 10, at_seconds(1), 0).has_value());
  }

  TEST_CASE("make_block: arrival order and cap") {
    auto l = make_ledger();
    for (std::uint64_t i = 0; i < 5; ++i) l.submit(null_tx(i), at_seconds(0));
    auto b = l.make_block(*l.tip(), 10, at_seconds(1), 0);
    REQUIRE(b);
    REQUIRE(b->txs.size() == 5);
    for (std::uint64_t i = 0; i < 5; ++i) CHECK(b->txs[i].id == tid(i));

    auto l2 = make_ledger();
    for (std::uint64_t i = 0; i < 20; ++i) l2.submit(null_tx(i), at_seconds(0));
    auto b2 = l2.make_block(*l2.tip(), 10, at_seconds(1), 0);
    REQUIRE(b2);
    CHECK(b2->txs.size() == 10);
    CHECK(b2->txs.front().id == tid(0));
    CHECK(b2->txs.back().id == tid(9));
    CHECK(l2.mempool().size() == 10);
  }

  TEST_CASE("apply_block: write, null-op and replay") {
    auto l = make_ledger();
    l.submit(write_tx(1, "k", "v"), at_seconds(0));
    l.submit(null_tx(2), at_seconds(0));
    auto before = l.contract(1)->digest();
    auto b = next_block(l);
    auto r = l.apply_block(b, at_seconds(1));
    CHECK(r.ok);
    CHECK(l.read(1, "k").value == "v");
    CHECK(l.is_committed(tid(2)));
    CHECK(r.event.per_tx.size() == 2);
    for (const auto& c : r.event.per_tx) CHECK(c.confirm_time == at_seconds(1));
    CHECK(l.contract(1)->digest() != before);

    const auto after = l.contract(1)->digest();
    auto replay = l.apply_block(b, at_seconds(2));
    CHECK_FALSE(replay.ok);
    CHECK(l.contract(1)->digest() == after);
    CHECK(l.height() == 1);
  }

  TEST_CASE("apply_block: null-op leaves state unchanged") {
    auto l = make_ledger();
    const auto before = l.contract(1)->digest();
    l.submit(null_tx(1), at_seconds(0));
    CHECK(l.apply_block(next_block(l), at_seconds(1)).ok);
    CHECK(l.contract(1)->digest() == before);
    CHECK(l.is_committed(tid(1)));
  }

  TEST_CASE("apply_block: parent mismatch rejected") {
    auto l = make_ledger();
    l.submit(null_tx(1), at_seconds(0));
    auto b = l.make_block(*l.tip(), 10, at_seconds(1), 0);
    REQUIRE(b);
    b->parent_hash[0] ^= 1;
    b->seal();
    const auto digest = l.contract(1)->digest();
    auto r = l.apply_block(std::make_shared<const Block>(*b), at_seconds(1));
    CHECK_FALSE(r.ok);
    CHECK(l.height() == 0);
    CHECK(l.contract(1)->digest() == digest);
  }

  TEST_CASE("apply_block: tampered hash rejected") {
    auto l = make_ledger();
    l.submit(null_tx(1), at_seconds(0));
    auto b = l.make_block(*l.tip(), 10, at_seconds(1), 0);
    REQUIRE(b);
    b->proposer = 3;
    CHECK_FALSE(b->verify_hash());
    CHECK_FALSE(l.apply_block(std::make_shared<const Block>(*b), at_seconds(1)).ok);
  }

  TEST_CASE("execution_cost") {
    CostModel m;
    CHECK(m.execution_cost(Method::NullOp, 0, 0, 1000, 0) == m.base);
    CHECK(m.execution_cost(Method::ReadWriteSet, 0, 2, 1000, 0) - m.execution_cost(Method::ReadWriteSet, 0, 1, 1000, 0) ==
          m.per_write);
    CHECK(m.execution_cost(Method::Write, 0, 1, 1000, 64) == m.execution_cost(Method::Write, 0, 1, 1'000'000, 64));
    CHECK(m.execution_cost(Method::ReadWriteSet, 3, 0, 0, 0) == m.base + 3 * m.per_read);
    CHECK(m.execution_cost(Method::NullOp, 0, 0, 0, 1000) == m.base + sim::nanos(1000 * m.per_byte_ns));
  }

  TEST_CASE("state determinism: replay on a fresh node") {
    auto a = make_ledger();
    for (std::uint64_t i = 0; i < 30; ++i) {
      a.submit(write_tx(i, "k" + std::to_string(i % 7), "v" + std::to_string(i)), at_seconds(0));
      if (i % 10 == 9) CHECK(a.apply_block(next_block(a, 4096, double(i)), at_seconds(double(i))).ok);
    }
    auto b = make_ledger();
    for (std::uint64_t h = 1; h <= a.height(); ++h) CHECK(b.apply_block(a.block_at(h), at_seconds(double(h))).ok);
    CHECK(a.contract(1)->digest() == b.contract(1)->digest());
    CHECK(a.verify_chain());
    CHECK(b.verify_chain());
    for (std::uint64_t h = 0; h <= a.height(); ++h) CHECK(a.block_at(h)->serialize() == b.block_at(h)->serialize());
  }

  TEST_CASE("exactly-once: committed txs are never re-included") {
    auto l = make_ledger();
    l.submit(null_tx(1), at_seconds(0));
    CHECK(l.apply_block(next_block(l), at_seconds(1)).ok);
    CHECK(l.submit(null_tx(1), at_seconds(2)) == SubmitError::AlreadyCommitted);
    CHECK(l.committed_height(tid(1)) == 1u);
  }

  TEST_CASE("call encoding round-trips") {
    Call c;
    c.method = Method::Write;
    c.key = "k12";
    c.value = std::string(32, 'z');
    c.payload = {1, 2, 3, 4, 5};
    CHECK(Call::decode(c.encode()) == c);
    CHECK(c.encode().size() == c.encoded_size());
    Call too_long = c;
    too_long.key = std::string(33, 'a');
    CHECK_THROWS(too_long.encode());
  }

  TEST_CASE("store rejects values longer than a word") {
    ContractState c(1, Visibility::Public, std::nullopt, 0);
    CHECK_THROWS_AS(c.put("k", std::string(33, 'x')), std::invalid_argument);
    c.put("k", std::string(32, 'x'));
    CHECK(c.get("k") == std::string(32, 'x'));
  }

  TEST_CASE("mempool: FIFO, erase and re-push") {
    Mempool m;
    CHECK(m.push(null_tx(1), at_seconds(0)));
    CHECK(m.push(null_tx(2), at_seconds(1)));
    CHECK_FALSE(m.push(null_tx(1), at_seconds(2)));
    CHECK(m.erase(tid(1)));
    CHECK(m.push(null_tx(1), at_seconds(3)));
    auto d = m.drain(10);
    REQUIRE(d.size() == 2);
    CHECK(d[0].id == tid(2));
    CHECK(d[1].id == tid(1));
    CHECK(m.empty());
  }

  TEST_CASE("mempool: push_front restores order") {
    Mempool m;
    m.push(null_tx(3), at_seconds(0));
    m.push_front({null_tx(1), null_tx(2)}, at_seconds(0));
    auto d = m.drain(10);
    REQUIRE(d.size() == 3);
    CHECK(d[0].id == tid(1));
    CHECK(d[1].id == tid(2));
    CHECK(d[2].id == tid(3));
  }
}
