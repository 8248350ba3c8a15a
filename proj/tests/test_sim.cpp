#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "permledger/sim/kernel.hpp"
#include "permledger/sim/network.hpp"
#include "permledger/sim/rng.hpp"

using namespace permledger::sim;

TEST_SUITE("sim-kernel") {
  TEST_CASE("schedule: delay from now") {
    Scheduler s;
    s.run_until(at_seconds(2.0));
    SimTime fired{};
    s.schedule(seconds(0.5), 0, [&] { fired = s.now(); });
    s.run_until(at_seconds(10));
    CHECK(fired == at_seconds(2.5));
  }

  TEST_CASE("schedule: same fire time delivers in schedule order") {
    Scheduler s;
    std::vector<int> order;
    for (int i = 0; i < 5; ++i) s.schedule(millis(1), 0, [&order, i] { order.push_back(i); });
    s.run_until(at_seconds(1));
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
  }

  TEST_CASE("schedule: zero delay fires after already-due events") {
    Scheduler s;
    std::vector<int> order;
    s.schedule(millis(1), 0, [&] {
      order.push_back(1);
      s.schedule(Duration::zero(), 0, [&] { order.push_back(3); });
    });
    s.schedule(millis(1), 0, [&] { order.push_back(2); });
    s.run_until(at_seconds(1));
    CHECK(order == std::vector<int>{1, 2, 3});
  }

  TEST_CASE("schedule: negative delay rejected") {
    Scheduler s;
    CHECK_THROWS_AS(s.schedule(millis(-1), 0, [] {}), std::invalid_argument);
    s.run_until(at_seconds(1));
    CHECK_THROWS_AS(s.schedule_at(at_seconds(0.5), 0, [] {}), std::invalid_argument);
  }

  TEST_CASE("run_until: empty queue advances the clock") {
    Scheduler s;
    CHECK(s.run_until(at_seconds(10)) == at_seconds(10));
    CHECK(s.now() == at_seconds(10));
    CHECK_THROWS_AS(s.run_until(at_seconds(5)), std::invalid_argument);
  }

  TEST_CASE("run_until: dispatches only due events") {
    Scheduler s;
    int fired = 0;
    for (double t : {1.0, 2.0, 3.0}) s.schedule_at(at_seconds(t), 0, [&] { ++fired; });
    s.run_until(at_seconds(2));
    CHECK(fired == 2);
    CHECK(s.pending() == 1);
  }

  TEST_CASE("run_until: events scheduled by handlers also fire") {
    Scheduler s;
    bool inner = false;
    s.schedule_at(at_seconds(1.0), 0, [&] { s.schedule_at(at_seconds(1.5), 0, [&] { inner = true; }); });
    s.run_until(at_seconds(2));
    CHECK(inner);
  }

  TEST_CASE("cancel") {
    Scheduler s;
    bool fired = false;
    auto id = s.schedule(millis(5), 0, [&] { fired = true; });
    CHECK(s.cancel(id));
    CHECK_FALSE(s.cancel(id));
    s.run_until(at_seconds(1));
    CHECK_FALSE(fired);
    CHECK(s.cancelled() == 1);
  }

  TEST_CASE("clock monotonicity and conservation") {
    Scheduler s;
    Rng rng(7);
    std::vector<SimTime> fire_times;
    for (int i = 0; i < 500; ++i) {
      s.schedule(Duration{static_cast<std::int64_t>(rng.below(1'000'000))}, 0, [&] {
        fire_times.push_back(s.now());
        if (fire_times.size() < 800) s.schedule(Duration{static_cast<std::int64_t>(rng.below(1000))}, 0, [&] {
            fire_times.push_back(s.now());
          });
      });
    }
    s.run_until(at_seconds(0.0005));
    CHECK(std::is_sorted(fire_times.begin(), fire_times.end()));
    CHECK(s.dispatched() + s.pending() == s.scheduled());
    s.run_until(at_seconds(1));
    CHECK(std::is_sorted(fire_times.begin(), fire_times.end()));
    CHECK(s.dispatched() == s.scheduled());
    CHECK(s.pending() == 0);
  }

  TEST_CASE("trace digest is reproducible") {
    auto run = [](std::uint64_t seed) {
      Scheduler s;
      Rng rng(seed);
      for (int i = 0; i < 200; ++i) s.schedule(Duration{static_cast<std::int64_t>(rng.below(10000))}, i, [] {});
      s.run_until(at_seconds(1));
      return s.trace_digest();
    };
    CHECK(run(1) == run(1));
    CHECK(run(1) != run(2));
  }

  TEST_CASE("net_delay") {
    NetworkModel link;
    CHECK(link.base_latency == micros(500));
    CHECK(link.bandwidth_bps == doctest::Approx(1e9));
    CHECK(net_delay(1024, link) == micros(500) + nanos(8192));
    CHECK(to_millis(net_delay(1024, link)) == doctest::Approx(0.5082).epsilon(1e-4));
    CHECK(net_delay(0, link) == link.base_latency);
    CHECK(net_delay(30 * 1024, link) > net_delay(1024, link));
  }

  TEST_CASE("net_delay with jitter stays within bounds") {
    NetworkModel link;
    link.jitter = micros(100);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      auto d = net_delay(100, link, &rng);
      CHECK(d >= net_delay(100, link));
      CHECK(d <= net_delay(100, link) + micros(100));
    }
  }

  TEST_CASE("rng: same seed, same stream") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.next();
      CHECK(x == b.next());
      differs |= x != c.next();
    }
    CHECK(differs);
  }

  TEST_CASE("rng: streams are independent of each other's draws") {
    auto s1 = Rng::stream(42, 1);
    auto s2 = Rng::stream(42, 2);
    std::vector<std::uint64_t> alone;
    {
      auto t = Rng::stream(42, 2);
      for (int i = 0; i < 100; ++i) alone.push_back(t.next());
    }
    for (int i = 0; i < 100; ++i) {
      s1.next();
      CHECK(s2.next() == alone[static_cast<std::size_t>(i)]);
    }
  }

  TEST_CASE("rng: pinned outputs") {
    // Golden values; any change here breaks report reproducibility.
    Rng a(42);
    CHECK(a.next() == 2576493707698874361ULL);
    CHECK(a.below(1000) == 325);
    CHECK(a.uniform() == 0.97019593185647635);
    CHECK(Rng::stream(42, 1).next() == 322574185352333729ULL);
    std::mt19937_64 ref(5489u);
    CHECK(ref() == 14514284786278117030ULL);
  }

  TEST_CASE("rng: draws within range") {
    Rng r(9);
    for (int i = 0; i < 10000; ++i) {
      CHECK(r.below(7) < 7);
      const double u = r.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      const auto d = r.uniform(millis(150), millis(300));
      CHECK(d >= millis(150));
      CHECK(d <= millis(300));
    }
  }

  TEST_CASE("network: FIFO per link and down endpoints") {
    Scheduler s;
    Network net(s, NetworkModel{}, Rng(1));
    std::vector<int> got;
    net.send(0, 1, 30000, Traffic::Consensus, [&] { got.push_back(1); });
    net.send(0, 1, 10, Traffic::Consensus, [&] { got.push_back(2); });
    s.run_until(at_seconds(1));
    CHECK(got == std::vector<int>{1, 2});
    CHECK(net.messages(Traffic::Consensus) == 2);

    net.set_down(1, true);
    net.send(0, 1, 10, Traffic::Client, [&] { got.push_back(3); });
    s.run_until(at_seconds(2));
    CHECK(got.size() == 2);
    CHECK(net.dropped() == 1);
  }
}
