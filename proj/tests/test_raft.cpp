#include <doctest.h>

#include "permledger/consensus/raft.hpp"
#include "support.hpp"

using namespace permledger;
using namespace permledger::consensus;
using permledger::testing::MockContext;
using permledger::testing::RecordingSink;
using permledger::testing::write_tx;
using sim::at_seconds;
using sim::millis;

namespace {

BlockPtr block_on(const ledger::Block& parent, std::uint64_t n) {
  ledger::Block b;
  b.height = parent.height + 1;
  b.parent_hash = parent.hash;
  b.timestamp = parent.timestamp + millis(50);
  b.txs.push_back(write_tx(n, 1, "k", "v" + std::to_string(n)));
  b.seal();
  return std::make_shared<const ledger::Block>(std::move(b));
}

// The token of the most recent timer armed with the given delay.
std::uint64_t timer_with(const MockContext& ctx, sim::Duration delay) {
  for (auto it = ctx.timers.rbegin(); it != ctx.timers.rend(); ++it) {
    if (it->first == delay) return it->second;
  }
  FAIL("no such timer");
  return 0;
}

node::ClusterConfig raft_cluster(std::uint32_t voters, double bt_ms, std::uint64_t seed) {
  node::ClusterConfig c;
  c.algorithm = node::Algorithm::Raft;
  c.raft.voters = voters;
  c.raft.f = (voters - 1) / 2;
  c.raft.block_time = millis(bt_ms);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("consensus-raft") {
  TEST_CASE("config") {
    RaftConfig c;
    CHECK(c.heartbeat_interval() == millis(25));
    c.block_time = millis(10);
    CHECK(c.heartbeat_interval() == millis(10));
    CHECK(c.majority() == 2);
    c.voters = 5;
    CHECK(c.majority() == 3);
  }

  TEST_CASE("append: follower in sync acks and extends its log") {
    MockContext ctx(1, 3);
    RaftEngine e(ctx, RaftConfig{});
    e.start();
    CHECK(e.role() == RaftRole::Follower);
    const auto b = block_on(*ctx.ledger().tip(), 1);
    e.handle_append(0, AppendEntries{1, 0, 0, 0, {LogEntry{1, b}}, 0});
    CHECK(e.last_index() == 1);
    auto acks = ctx.sent_of<AppendResponse>();
    REQUIRE(acks.size() == 1);
    CHECK(acks[0].second.success);
    CHECK(acks[0].second.match_index == 1);
  }

  TEST_CASE("append: stale term rejected") {
    MockContext ctx(1, 3);
    RaftEngine e(ctx, RaftConfig{});
    e.start();
    e.force_election_timeout();  // term 2
    ctx.sent.clear();
    e.handle_append(0, AppendEntries{1, 0, 0, 0, {LogEntry{1, block_on(*ctx.ledger().tip(), 1)}}, 0});
    auto acks = ctx.sent_of<AppendResponse>();
    REQUIRE(acks.size() == 1);
    CHECK_FALSE(acks[0].second.success);
    CHECK(acks[0].second.term == 2);
    CHECK(e.last_index() == 0);
  }

  TEST_CASE("append: leader commit ahead of the local log commits to the local end") {
    MockContext ctx(1, 3);
    RaftEngine e(ctx, RaftConfig{});
    e.start();
    e.handle_append(0, AppendEntries{1, 0, 0, 0, {LogEntry{1, block_on(*ctx.ledger().tip(), 1)}}, 5});
    CHECK(e.commit_index() == 1);
    CHECK(ctx.committed.size() == 1);
    CHECK(ctx.ledger().height() == 1);
  }

  TEST_CASE("append: log inconsistency rejected with a hint") {
    MockContext ctx(1, 3);
    RaftEngine e(ctx, RaftConfig{});
    e.start();
    e.handle_append(0, AppendEntries{1, 0, 3, 1, {}, 0});
    auto acks = ctx.sent_of<AppendResponse>();
    REQUIRE(acks.size() == 1);
    CHECK_FALSE(acks[0].second.success);
    CHECK(acks[0].second.match_index == 0);
  }

  TEST_CASE("append: conflicting suffix is truncated") {
    MockContext ctx(1, 3);
    RaftEngine e(ctx, RaftConfig{});
    e.start();
    const auto genesis = ctx.ledger().tip();
    e.handle_append(0, AppendEntries{1, 0, 0, 0, {LogEntry{1, block_on(*genesis, 1)}}, 0});
    const auto other = block_on(*genesis, 2);
    e.handle_append(2, AppendEntries{2, 2, 0, 0, {LogEntry{2, other}}, 0});
    REQUIRE(e.last_index() == 1);
    CHECK(e.log()[1].block == other);
    CHECK(e.term() == 2);
  }

  auto leader_with_block = [](MockContext& ctx, RaftEngine& e) {
    e.start();
    REQUIRE(e.role() == RaftRole::Leader);
    CHECK(e.on_client_tx(write_tx(1, 1, "k", "v")));
    e.on_timer(timer_with(ctx, millis(50)));
    REQUIRE(e.last_index() == 1);
  };

  TEST_CASE("advance_commit: n=3, leader plus one ack commits") {
    MockContext ctx(0, 3);
    RaftEngine e(ctx, RaftConfig{});
    leader_with_block(ctx, e);
    CHECK(ctx.sent_of<AppendEntries>().size() == 2);
    CHECK(e.commit_index() == 0);
    e.on_message(1, AppendResponse{1, true, 1, false});
    CHECK(e.commit_index() == 1);
    CHECK(ctx.committed.size() == 1);
  }

  TEST_CASE("advance_commit: n=3, no acks, nothing commits") {
    MockContext ctx(0, 3);
    RaftEngine e(ctx, RaftConfig{});
    leader_with_block(ctx, e);
    CHECK(e.commit_index() == 0);
    CHECK(ctx.committed.empty());
  }

  TEST_CASE("advance_commit: n=5 needs two acks") {
    MockContext ctx(0, 5);
    RaftConfig cfg;
    cfg.voters = 5;
    cfg.f = 2;
    RaftEngine e(ctx, cfg);
    leader_with_block(ctx, e);
    e.on_message(1, AppendResponse{1, true, 1, false});
    CHECK(e.commit_index() == 0);
    e.on_message(1, AppendResponse{1, true, 1, false});
    CHECK(e.commit_index() == 0);
    e.on_message(3, AppendResponse{1, true, 1, false});
    CHECK(e.commit_index() == 1);
  }

  TEST_CASE("tick: empty mempool sends nothing") {
    MockContext ctx(0, 3);
    RaftEngine e(ctx, RaftConfig{});
    e.start();
    e.on_timer(timer_with(ctx, millis(50)));
    CHECK(ctx.sent_of<AppendEntries>().empty());
    CHECK(e.last_index() == 0);
    CHECK(e.stats().blocks_proposed == 0);
  }

  TEST_CASE("tick: proposals on block-time multiples") {
    node::Cluster cluster(raft_cluster(3, 50, 1));
    const auto contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, 1);
    RecordingSink sink;
    cluster.register_client(0, &sink);
    cluster.subscribe(0, 0);
    cluster.start();
    for (int i = 0; i < 4; ++i) {
      cluster.scheduler().schedule_at(at_seconds(0.001 + 0.05 * i), 0, [&cluster, i, contract] {
        cluster.submit(0, 0, write_tx(static_cast<std::uint64_t>(i), contract, "k", "v"));
      });
    }
    cluster.scheduler().run_until(at_seconds(2));
    const auto& chain = cluster.node(0).ledger().chain();
    REQUIRE(chain.size() == 5);
    for (std::size_t h = 1; h < chain.size(); ++h) {
      CHECK(chain[h]->timestamp == at_seconds(0.05 * double(h)));
    }
  }

  TEST_CASE("tick: tx at 10 ms with 1000 ms block time waits for the tick") {
    node::Cluster cluster(raft_cluster(3, 1000, 1));
    const auto contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, 1);
    RecordingSink sink;
    cluster.register_client(0, &sink);
    cluster.subscribe(0, 0);
    cluster.start();
    cluster.scheduler().schedule_at(at_seconds(0.010), 0, [&] { cluster.submit(0, 0, write_tx(1, contract, "k", "v")); });
    cluster.scheduler().run_until(at_seconds(3));
    REQUIRE(cluster.node(0).ledger().height() == 1);
    CHECK(cluster.node(0).ledger().tip()->timestamp == at_seconds(1.0));
  }

  TEST_CASE("idle cluster sends no consensus traffic") {
    node::Cluster cluster(raft_cluster(3, 50, 1));
    cluster.start();
    cluster.scheduler().run_until(at_seconds(5));
    CHECK(cluster.network().messages(sim::Traffic::Consensus) == 0);
    CHECK(cluster.network().messages(sim::Traffic::Heartbeat) > 0);
    CHECK(cluster.leader() == 0u);
  }

  TEST_CASE("election: leader crash, a follower takes over and commits") {
    node::Cluster cluster(raft_cluster(3, 50, 3));
    const auto contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, 1);
    RecordingSink sink;
    cluster.register_client(0, &sink);
    cluster.subscribe(0, 1);
    cluster.start();
    cluster.scheduler().run_until(at_seconds(0.5));
    cluster.crash(0);
    cluster.scheduler().run_until(at_seconds(2));
    const auto leader = cluster.leader();
    REQUIRE(leader.has_value());
    CHECK(*leader != 0u);
    cluster.submit(0, 1, write_tx(7, contract, "k", "after"));
    cluster.scheduler().run_until(at_seconds(4));
    CHECK(sink.confirmations[permledger::testing::make_id(7)] == 1);
    CHECK(cluster.node(1).ledger().read(contract, "k").value == "after");
    CHECK(cluster.chains_consistent());
  }

  TEST_CASE("election: two simultaneous candidates, at most one leader per term") {
    MockContext c1(1, 3), c2(2, 3), c0(0, 3);
    RaftConfig cfg;
    cfg.bootstrap_leader = false;
    RaftEngine e0(c0, cfg), e1(c1, cfg), e2(c2, cfg);
    e0.start();
    e1.start();
    e2.start();
    e1.force_election_timeout();
    e2.force_election_timeout();
    // Node 0 grants the first request it sees for term 1.
    for (auto& [to, m] : c1.sent_of<RequestVote>()) {
      if (to == 0) e0.on_message(1, m);
    }
    for (auto& [to, m] : c2.sent_of<RequestVote>()) {
      if (to == 0) e0.on_message(2, m);
    }
    for (auto& [to, m] : c0.sent_of<VoteResponse>()) {
      (to == 1 ? e1 : e2).on_message(0, m);
    }
    const int leaders = (e1.role() == RaftRole::Leader) + (e2.role() == RaftRole::Leader);
    CHECK(leaders == 1);
    CHECK(e1.term() == e2.term());
  }

  TEST_CASE("crashed majority commits nothing") {
    node::Cluster cluster(raft_cluster(3, 50, 5));
    const auto contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, 1);
    RecordingSink sink;
    cluster.register_client(0, &sink);
    cluster.subscribe(0, 2);
    cluster.start();
    cluster.crash(0);
    cluster.crash(1);
    cluster.submit(0, 2, write_tx(1, contract, "k", "v"));
    cluster.scheduler().run_until(at_seconds(10));
    CHECK(cluster.node(2).ledger().height() == 0);
    CHECK(sink.confirmations.empty());
  }

  TEST_CASE("property: safety and exactly-once across seeds with leader crashes") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      CAPTURE(seed);
      node::Cluster cluster(raft_cluster(3, 50, seed));
      const auto contract = cluster.deploy_contract(10, ledger::Visibility::Public, std::nullopt, seed);
      std::vector<std::unique_ptr<RecordingSink>> sinks;
      for (ledger::ClientId c = 0; c < 3; ++c) {
        sinks.push_back(std::make_unique<RecordingSink>());
        cluster.register_client(c, sinks.back().get());
        cluster.subscribe(c, c);
      }
      cluster.start();
      for (std::uint64_t i = 0; i < 90; ++i) {
        const auto c = static_cast<ledger::ClientId>(i % 3);
        cluster.scheduler().schedule_at(at_seconds(0.01 * double(i)), 0, [&cluster, c, i, contract] {
          cluster.submit(c, c, write_tx(i, contract, "k" + std::to_string(i % 5), "v", c));
        });
      }
      cluster.scheduler().schedule_at(at_seconds(0.3 + 0.01 * double(seed % 7)), 0, [&] {
        if (auto l = cluster.leader()) cluster.crash(*l);
      });
      cluster.scheduler().run_until(at_seconds(30));
      CHECK(cluster.chains_consistent());
      // Every tx appears in exactly one block on every live node.
      for (ledger::NodeId n = 0; n < 3; ++n) {
        if (cluster.node(n).crashed()) continue;
        std::map<ledger::TxId, int> seen;
        for (const auto& b : cluster.node(n).ledger().chain()) {
          for (const auto& tx : b->txs) ++seen[tx.id];
        }
        for (const auto& [id, count] : seen) CHECK(count == 1);
        CHECK(cluster.node(n).ledger().verify_chain());
      }
    }
  }
}
