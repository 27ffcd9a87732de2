#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>

#include "helpers.hpp"
#include "qpsim/matching.hpp"
#include "qpsim/schedulers.hpp"

using namespace qpsim;

namespace {

QueueMatrix qm(const Rows& r) { return QueueMatrix::from_rows(r); }

std::vector<SchedulerSpec> all_specs() {
  return {SchedulerSpec::parse("qps:r=1"), SchedulerSpec::parse("qps:r=3"), SchedulerSpec::parse("islip"),
          SchedulerSpec::parse("mwm"), SchedulerSpec::parse("greedy")};
}

}  // namespace

TEST_CASE("scheduler spec parsing") {
  CHECK(SchedulerSpec::parse("qps").iterations == 3);
  CHECK(SchedulerSpec::parse("qps:r=1") == SchedulerSpec{SchedulerSpec::Kind::qps, 1});
  CHECK(SchedulerSpec::parse("islip:iters=6") == SchedulerSpec{SchedulerSpec::Kind::islip, 6});
  CHECK(SchedulerSpec::parse("islip").iterations == 0);
  CHECK(SchedulerSpec::parse("mwm").kind == SchedulerSpec::Kind::mwm);
  for (const auto& s : all_specs()) CHECK(SchedulerSpec::parse(s.to_string()) == s);
  CHECK_THROWS_AS(SchedulerSpec::parse("qps:r=0"), std::invalid_argument);
  CHECK_THROWS_AS(SchedulerSpec::parse("fifo"), std::invalid_argument);
  CHECK_THROWS_AS(SchedulerSpec::parse("qps:x=2"), std::invalid_argument);
  CHECK(default_islip_iterations(2) == 1);
  CHECK(default_islip_iterations(64) == 6);
  CHECK(default_islip_iterations(65) == 7);
}

TEST_CASE("every scheduler returns a valid matching and is reproducible") {
  std::mt19937_64 gen(1);
  for (const auto& spec : all_specs()) {
    auto a = make_scheduler(spec, 12, 77);
    auto b = make_scheduler(spec, 12, 77);
    for (int t = 0; t < 300; ++t) {
      const auto q = testing::random_queue(12, gen, 0.3);
      const auto ma = a->schedule(q);
      CHECK(is_matching(ma));
      CHECK(ma.sorted() == b->schedule(q).sorted());
      for (auto e : ma.edges()) CHECK(q(e.input, e.output) > 0);
    }
  }
}

TEST_CASE("zero queues give empty matchings") {
  for (const auto& spec : all_specs()) CHECK(make_scheduler(spec, 4, 1)->schedule(QueueMatrix(4)).empty());
}

TEST_CASE("QPS-r without contention") {
  const auto q = qm({{5, 0}, {0, 7}});
  Rng rng(9);
  for (unsigned r = 1; r <= 4; ++r)
    for (int t = 0; t < 50; ++t) CHECK(qps_r_schedule(q, r, rng) == Matching({{0, 0}, {1, 1}}));
  CHECK_THROWS_AS(qps_r_schedule(q, 0, rng), std::invalid_argument);
}

TEST_CASE("QPS-1 outcome law on [[1,1],[0,1]]") {
  // Input 0 proposes to 0 or 1 with prob 1/2; input 1 always proposes to 1.
  // Both at output 1 tie at length 1 and each wins with prob 1/2.
  const auto q = qm({{1, 1}, {0, 1}});
  Rng rng(123);
  const int trials = 400000;
  std::map<std::vector<Edge>, double> seen;
  for (int t = 0; t < trials; ++t) seen[qps_r_schedule(q, 1, rng).sorted()] += 1.0;
  const std::vector<Edge> both{{0, 0}, {1, 1}}, first{{0, 1}}, second{{1, 1}};
  REQUIRE(seen.size() == 3);
  const std::vector<double> counts{seen[both], seen[first], seen[second]};
  CHECK(testing::chi_square(counts, {0.5, 0.25, 0.25}) < boost::math::quantile(boost::math::chi_squared(2), 0.99));
  CHECK(testing::within_binomial(seen[first], trials, 0.25));
  CHECK(testing::within_binomial(seen[both] + seen[second], trials, 0.75));
}

TEST_CASE("QPS proposal marginal with a single active input") {
  QueueMatrix q(6);
  const std::vector<Count> w{4, 0, 1, 2, 0, 9};
  for (std::size_t j = 0; j < w.size(); ++j) q.set(2, j, w[j]);
  Rng rng(31);
  std::vector<double> counts(6, 0.0);
  const int draws = 200000;
  for (int t = 0; t < draws; ++t) {
    const auto m = qps_r_schedule(q, 1, rng);
    REQUIRE(m.size() == 1);
    counts[m.edges()[0].output] += 1.0;
  }
  std::vector<double> probs;
  for (auto x : w) probs.push_back(static_cast<double>(x) / 16.0);
  CHECK(counts[1] == 0.0);
  CHECK(testing::chi_square(counts, probs) < boost::math::quantile(boost::math::chi_squared(3), 0.99));
}

TEST_CASE("QPS accepts the longest proposal") {
  // Both inputs can only propose to output 0; the longer VOQ must win.
  const auto q = qm({{3, 0}, {8, 0}});
  Rng rng(4);
  for (int t = 0; t < 100; ++t) CHECK(qps_r_schedule(q, 1, rng) == Matching({{1, 0}}));
}

TEST_CASE("QPS-r matching size is monotone in r under coupled randomness") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 500; ++t) {
    const auto q = testing::random_queue(10, gen, 0.35);
    const std::uint64_t seed = gen();
    std::vector<Edge> prev;
    for (unsigned r = 1; r <= 5; ++r) {
      Rng rng(seed);
      const auto m = qps_r_schedule(q, r, rng).sorted();
      CHECK(m.size() >= prev.size());
      CHECK(std::includes(m.begin(), m.end(), prev.begin(), prev.end()));
      prev = m;
    }
  }
}

TEST_CASE("iSLIP hand trace on all-positive 2x2") {
  // Iteration 1: both inputs request both outputs. Grant pointers at 0, so
  // both outputs grant input 0. Input 0 accepts output 0 (its pointer is 0).
  // Iteration 2: input 1 requests output 1, output 1 grants, input 1 accepts.
  const auto q = qm({{1, 1}, {1, 1}});
  IslipPointers ptr(2);
  const auto m = islip_schedule(q, 2, ptr);
  CHECK(m == Matching({{0, 0}, {1, 1}}));
  // Only the first-iteration accept moves pointers: grant[0] -> 1, accept[0] -> 1.
  CHECK(ptr.grant == std::vector<std::size_t>{1, 0});
  CHECK(ptr.accept == std::vector<std::size_t>{1, 0});
  // One iteration only finds the first pair.
  IslipPointers fresh(2);
  CHECK(islip_schedule(q, 1, fresh) == Matching({{0, 0}}));
}

TEST_CASE("iSLIP desynchronizes under persistent full load") {
  const auto q = qm({{5, 5, 5}, {5, 5, 5}, {5, 5, 5}});
  IslipScheduler s(3, 1);
  std::size_t last = 0;
  for (int t = 0; t < 10; ++t) last = s.schedule(q).size();
  CHECK(last == 3);
}

TEST_CASE("iSLIP single nonempty VOQ") {
  QueueMatrix q(5);
  q.set(3, 1, 2);
  IslipPointers ptr(5);
  CHECK(islip_schedule(q, 3, ptr) == Matching({{3, 1}}));
}

TEST_CASE("MWM examples") {
  CHECK(mwm_schedule(qm({{2, 0}, {0, 3}})) == Matching({{0, 0}, {1, 1}}));
  const auto m = mwm_schedule(qm({{3, 2}, {2, 0}}));
  CHECK(m == Matching({{0, 1}, {1, 0}}));
  CHECK(m.weight(qm({{3, 2}, {2, 0}})) == 4);
}

TEST_CASE("MWM weight equals the brute-force maximum") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + gen() % 6;
    const auto q = testing::random_queue(n, gen, 0.7, 50);
    const auto m = mwm_schedule(q);
    CHECK(is_matching(m));
    CHECK(m.weight(q) == testing::brute_force_max_weight(q));
  }
  // 5x5 with large weights
  for (int t = 0; t < 50; ++t) {
    const auto q = testing::random_queue(5, gen, 1.0, 1'000'000);
    CHECK(mwm_schedule(q).weight(q) == testing::brute_force_max_weight(q));
  }
}

TEST_CASE("greedy maximal examples and guarantees") {
  Rng rng(6);
  QueueMatrix full(7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) full.set(i, j, 1);
  CHECK(greedy_maximal_schedule(full, rng).size() == 7);
  for (int t = 0; t < 100; ++t) CHECK(greedy_maximal_schedule(qm({{1, 1}, {1, 1}}), rng).size() == 2);

  std::mt19937_64 gen(10);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + gen() % 16;
    const auto q = testing::random_queue(n, gen, 0.25);
    const auto m = greedy_maximal_schedule(q, rng);
    REQUIRE(is_matching(m));
    CHECK(is_maximal(m, q));
  }
}

TEST_CASE("MWM weight bounds greedy; greedy size is at least half the maximum matching") {
  std::mt19937_64 gen(12);
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + gen() % 5;
    const auto q = testing::random_queue(n, gen, 0.6, 20);
    QueueMatrix support(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) support.set(i, j, q(i, j) > 0 ? 1 : 0);
    const auto best = testing::brute_force_max_weight(q);
    const auto g = greedy_maximal_schedule(q, rng);
    CHECK(mwm_schedule(q).weight(q) == best);
    CHECK(g.weight(q) <= best);
    CHECK(2 * g.size() >= testing::brute_force_max_weight(support));
  }
}

TEST_CASE("random-order maximal matchings carry no weight guarantee") {
  // {(0,0)} is maximal with weight 1 while the optimum is 200.
  const auto q = qm({{1, 100}, {100, 0}});
  const Matching poor({{0, 0}});
  CHECK(is_maximal(poor, q));
  CHECK(2 * poor.weight(q) < mwm_schedule(q).weight(q));
}
