#include <doctest.h>

#include "permledger/consensus/ibft.hpp"
#include "support.hpp"

using namespace permledger;
using namespace permledger::consensus;
using permledger::testing::MockContext;
using permledger::testing::RecordingSink;
using permledger::testing::write_tx;
using sim::at_seconds;

namespace {

constexpr int kRoundTimer = 1;
constexpr int kProposeTimer = 2;

std::uint64_t last_timer(const MockContext& ctx, int kind) {
  for (auto it = ctx.timers.rbegin(); it != ctx.timers.rend(); ++it) {
    if (static_cast<int>(it->second >> 56) == kind) return it->second;
  }
  FAIL("no such timer");
  return 0;
}

BlockPtr proposal(MockContext& ctx, NodeId proposer, std::uint64_t n = 1) {
  ledger::Block b;
  b.height = ctx.ledger().height() + 1;
  b.parent_hash = ctx.ledger().tip()->hash;
  b.proposer = proposer;
  b.timestamp = at_seconds(1);
  b.txs.push_back(write_tx(n, 1, "k", "v"));
  b.seal();
  return std::make_shared<const ledger::Block>(std::move(b));
}

node::ClusterConfig ibft_cluster(std::uint64_t seed) {
  node::ClusterConfig c;
  c.algorithm = node::Algorithm::Ibft;
  c.ibft.n = 4;
  c.ibft.f = 1;
  c.seed = seed;
  return c;
}

struct Run {
  std::unique_ptr<node::Cluster> cluster;
  std::vector<std::unique_ptr<RecordingSink>> sinks;
  ledger::ContractAddress contract = 0;
};

// Four validators, one client per node, `txs` writes spread over the first
// `seconds` simulated seconds.
Run drive(node::ClusterConfig cfg, int txs, double seconds, double until) {
  Run r;
  r.cluster = std::make_unique<node::Cluster>(std::move(cfg));
  auto& cluster = *r.cluster;
  r.contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, 1);
  for (ledger::ClientId c = 0; c < 4; ++c) {
    r.sinks.push_back(std::make_unique<RecordingSink>());
    cluster.register_client(c, r.sinks.back().get());
    cluster.subscribe(c, c);
  }
  cluster.start();
  for (int i = 0; i < txs; ++i) {
    const auto c = static_cast<ledger::ClientId>(i % 4);
    const auto contract = r.contract;
    cluster.scheduler().schedule_at(at_seconds(seconds * i / txs), 0, [&cluster, c, i, contract] {
      if (!cluster.node(c).crashed()) {
        cluster.submit(c, c, write_tx(static_cast<std::uint64_t>(i), contract, "k" + std::to_string(i % 3), "v", c));
      }
    });
  }
  cluster.scheduler().run_until(at_seconds(until));
  return r;
}

}  // namespace

TEST_SUITE("consensus-ibft") {
  TEST_CASE("select_proposer") {
    CHECK(select_proposer(5, 0, 4) == 1u);
    CHECK(select_proposer(5, 1, 4) == 2u);
    CHECK(select_proposer(5, 3, 4) == 0u);
    for (std::uint64_t h = 0; h < 20; ++h) {
      for (std::uint64_t r = 0; r < 5; ++r) CHECK(select_proposer(h, r, 4) == (h + r) % 4);
    }
  }

  TEST_CASE("quorum intersection") {
    for (std::uint32_t f = 1; f <= 20; ++f) {
      IbftConfig c;
      c.f = f;
      c.n = 3 * f + 1;
      CHECK(2 * c.quorum() - c.n >= f + 1);
    }
    IbftConfig c;
    CHECK(c.quorum() == 3);
    CHECK(c.round_timeout_value() == sim::seconds(2));
  }

  TEST_CASE("propose: fanout to n-1 validators") {
    MockContext ctx(1, 4);  // proposer of height 1, round 0
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    CHECK(e.on_client_tx(write_tx(1, 1, "k", "v")));
    ctx.advance(sim::seconds(1));
    e.on_timer(last_timer(ctx, kProposeTimer));
    CHECK(ctx.sent_of<PrePrepare>().size() == 3);
    CHECK(e.stats().blocks_proposed == 1);
  }

  TEST_CASE("propose: empty mempool defers by one block time") {
    MockContext ctx(1, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    ctx.advance(sim::seconds(1));
    e.on_timer(last_timer(ctx, kProposeTimer));
    CHECK(ctx.sent_of<PrePrepare>().empty());
    CHECK(ctx.timers.back().first == sim::seconds(1));
  }

  TEST_CASE("pre-prepare from a non-proposer is discarded") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    e.on_message(3, PrePrepare{1, 0, proposal(ctx, 3)});
    CHECK(e.stats().invalid_proposals == 1);
    CHECK(ctx.sent_of<Prepare>().empty());
  }

  TEST_CASE("prepare threshold: 2f+1 distinct senders, own included") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    const auto b = proposal(ctx, 1);
    e.on_message(1, PrePrepare{1, 0, b});
    REQUIRE(ctx.sent_of<Prepare>().size() == 3);
    e.on_message(3, Prepare{1, 0, b->hash});
    CHECK(ctx.sent_of<Commit>().empty());  // 2 distinct
    e.on_message(3, Prepare{1, 0, b->hash});
    CHECK(ctx.sent_of<Commit>().empty());  // duplicate counted once
    e.on_message(0, Prepare{1, 0, b->hash});
    CHECK(ctx.sent_of<Commit>().size() == 3);
    CHECK(e.locked() == b);
  }

  TEST_CASE("commit threshold commits and advances the height") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    const auto b = proposal(ctx, 1);
    e.on_message(1, PrePrepare{1, 0, b});
    e.on_message(3, Prepare{1, 0, b->hash});
    e.on_message(0, Prepare{1, 0, b->hash});
    e.on_message(3, Commit{1, 0, b->hash});
    CHECK(ctx.committed.empty());
    e.on_message(0, Commit{1, 0, b->hash});
    REQUIRE(ctx.committed.size() == 1);
    CHECK(ctx.committed[0] == b);
    CHECK(e.height() == 2);
    CHECK(e.round() == 0);
  }

  TEST_CASE("mismatched hash is discarded and counted") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    const auto b = proposal(ctx, 1);
    e.on_message(1, PrePrepare{1, 0, b});
    auto other = b->hash;
    other[0] ^= 1;
    e.on_message(3, Prepare{1, 0, other});
    e.on_message(0, Prepare{1, 0, other});
    CHECK(e.stats().equivocations_detected == 2);
    CHECK(ctx.sent_of<Commit>().empty());
  }

  TEST_CASE("round timer after commit is ignored") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    const auto stale = last_timer(ctx, kRoundTimer);
    const auto b = proposal(ctx, 1);
    e.on_message(1, PrePrepare{1, 0, b});
    e.on_message(3, Prepare{1, 0, b->hash});
    e.on_message(0, Prepare{1, 0, b->hash});
    e.on_message(3, Commit{1, 0, b->hash});
    e.on_message(0, Commit{1, 0, b->hash});
    REQUIRE(e.height() == 2);
    ctx.sent.clear();
    e.on_timer(stale);
    CHECK(ctx.sent_of<RoundChange>().empty());
    CHECK(e.round() == 0);
    CHECK(e.stats().round_changes == 0);
  }

  TEST_CASE("round timeout with pending work moves to the next round") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    e.on_client_tx(write_tx(1, 1, "k", "v"));
    ctx.advance(sim::seconds(2));
    e.on_timer(last_timer(ctx, kRoundTimer));
    CHECK(e.round() == 1);
    CHECK(ctx.sent_of<RoundChange>().size() == 3);
  }

  TEST_CASE("f+1 round changes pull a validator forward") {
    MockContext ctx(2, 4);
    IbftEngine e(ctx, IbftConfig{});
    e.start();
    e.on_message(0, RoundChange{1, 1});
    CHECK(e.round() == 0);
    e.on_message(3, RoundChange{1, 1});
    CHECK(e.round() == 1);
  }

  TEST_CASE("crashed proposer: commit in round 1 with the next proposer") {
    auto cfg = ibft_cluster(1);
    node::Cluster cluster(cfg);
    const auto contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, 1);
    RecordingSink sink;
    cluster.register_client(0, &sink);
    cluster.subscribe(0, 0);
    cluster.start();
    cluster.crash(1);  // proposer of height 1, round 0
    cluster.submit(0, 0, write_tx(1, contract, "k", "v"));
    cluster.scheduler().run_until(at_seconds(20));
    REQUIRE(cluster.node(0).ledger().height() >= 1);
    CHECK(cluster.node(0).ledger().block_at(1)->proposer == 2u);
    CHECK(sink.confirmations[permledger::testing::make_id(1)] == 1);
    CHECK(cluster.chains_consistent());
  }

  TEST_CASE("equivocating proposer: round change, then an honest proposer commits") {
    auto cfg = ibft_cluster(1);
    cfg.byzantine[1] = IbftBehavior::EquivocatingProposer;
    auto r = drive(cfg, 4, 0.1, 30);
    auto& cluster = *r.cluster;
    CHECK(cluster.chains_consistent());
    REQUIRE(cluster.node(0).ledger().height() >= 1);
    CHECK(cluster.node(0).ledger().block_at(1)->proposer != 1u);
    std::uint64_t round_changes = 0;
    for (NodeId n = 0; n < 4; ++n) round_changes += cluster.node(n).engine().stats().round_changes;
    CHECK(round_changes > 0);
    for (int i = 0; i < 4; ++i) {
      const auto c = static_cast<ledger::ClientId>(i % 4);
      CHECK(r.sinks[c]->confirmations[permledger::testing::make_id(static_cast<std::uint64_t>(i), c)] == 1);
    }
  }

  TEST_CASE("property: safety across seeds with an equivocating proposer") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CAPTURE(seed);
      auto cfg = ibft_cluster(seed);
      cfg.byzantine[static_cast<NodeId>(seed % 4)] = IbftBehavior::EquivocatingProposer;
      auto r = drive(cfg, 40, 4, 40);
      CHECK(r.cluster->chains_consistent());
      for (NodeId n = 0; n < 4; ++n) CHECK(r.cluster->node(n).ledger().verify_chain());
    }
  }

  TEST_CASE("property: consensus messages per block are O(n^2)") {
    auto r = drive(ibft_cluster(2), 200, 10, 30);
    const auto blocks = r.cluster->node(0).ledger().height();
    REQUIRE(blocks > 0);
    const double per_block = double(r.cluster->network().messages(sim::Traffic::Consensus)) / double(blocks);
    CHECK(per_block <= 3.0 * 4 * 4);
  }

  TEST_CASE("silent validator: the remaining 2f+1 keep committing") {
    auto cfg = ibft_cluster(3);
    cfg.byzantine[3] = IbftBehavior::Silent;
    auto r = drive(cfg, 40, 4, 40);
    CHECK(r.cluster->chains_consistent());
    for (int i = 0; i < 40; ++i) {
      const auto c = static_cast<ledger::ClientId>(i % 4);
      if (c == 3) continue;
      CHECK(r.sinks[c]->confirmations[permledger::testing::make_id(static_cast<std::uint64_t>(i), c)] == 1);
    }
  }
}
