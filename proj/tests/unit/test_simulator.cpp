#include <doctest.h>

#include <cstring>
#include <map>

#include "helpers.hpp"
#include "qpsim/batch_means.hpp"
#include "qpsim/simulator.hpp"

using namespace qpsim;

namespace {

SimConfig small_config(const char* sched, Pattern p, double load, std::size_t n = 8) {
  SimConfig c;
  c.n = n;
  c.scheduler = SchedulerSpec::parse(sched);
  c.pattern = p;
  c.load = load;
  c.seed = 5;
  return c;
}

bool bit_identical(const SimResult& a, const SimResult& b) {
  auto same = [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; };
  return same(a.mean_delay, b.mean_delay) && same(a.delay_ci_halfwidth, b.delay_ci_halfwidth) &&
         same(a.mean_total_queue, b.mean_total_queue) && same(a.queue_ci_halfwidth, b.queue_ci_halfwidth) &&
         same(a.throughput, b.throughput) && a.slots_run == b.slots_run && a.packets_arrived == b.packets_arrived &&
         a.packets_departed == b.packets_departed && a.final_backlog == b.final_backlog && a.converged == b.converged;
}

}  // namespace

TEST_CASE("config validation and minimum length") {
  SimConfig c;
  c.n = 8;
  CHECK(c.min_slots() == 32000);
  CHECK(c.max_slots() == 20 * 32000);
  c.stopping.max_slots = 1000;
  CHECK(c.max_slots() == 1000);
  c.load = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.load = 0.5;
  c.n = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("derived seeds differ per stream") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("QPS-1 drains a backlog within its size without arrivals") {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    const auto q0 = testing::random_queue(6, gen, 0.5, 4);
    Simulation sim(make_scheduler(SchedulerSpec::parse("qps:r=1"), 6, gen()),
                   std::make_unique<BernoulliSource>(TrafficRateMatrix(6), 1), q0, {});
    CHECK(sim.initial_backlog() == q0.total());
    std::uint64_t steps = 0;
    while (sim.queues().total() > 0) {
      const auto r = sim.step();
      CHECK(r.departures >= 1);
      ++steps;
    }
    CHECK(steps <= q0.total());
    CHECK(sim.departed() == q0.total());
  }
}

TEST_CASE("a packet arriving in slot t leaves no earlier than t+1, in FIFO order") {
  SimConfig c = small_config("qps:r=3", Pattern::diagonal, 0.6);
  Simulation sim(make_scheduler(c.scheduler, c.n, 3), make_source(c.source, c.rates(), 4));
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> last;
  bool fifo = true, positive = true;
  sim.on_departure([&](Edge e, std::int64_t arrival, std::uint64_t departure) {
    auto& prev = last[{e.input, e.output}];
    fifo = fifo && arrival >= prev;
    prev = arrival;
    positive = positive && static_cast<std::int64_t>(departure) - arrival >= 1;
  });
  double delay_sum = 0.0;
  Count departures = 0;
  for (int t = 0; t < 20000; ++t) {
    const auto r = sim.step();
    delay_sum += r.delay_sum;
    departures += r.departures;
  }
  CHECK(fifo);
  CHECK(positive);
  CHECK(departures > 0);
  CHECK(delay_sum / static_cast<double>(departures) >= 1.0);
}

TEST_CASE("conservation and determinism across schedulers and sources") {
  for (const char* sched : {"qps:r=1", "qps:r=3", "islip", "greedy", "mwm"}) {
    auto c = small_config(sched, Pattern::quasi_diagonal, 0.6);
    c.stopping.min_slots_factor = 50;
    c.stopping.max_slots = 5000;
    for (const char* src : {"bernoulli", "onoff:burst=16"}) {
      c.source = SourceSpec::parse(src);
      const auto a = run(c);
      const auto b = run(c);
      CHECK(a.packets_arrived == a.packets_departed + a.final_backlog);
      CHECK(bit_identical(a, b));
      c.seed += 1;
      CHECK_FALSE(bit_identical(a, run(c)));
    }
  }
}

TEST_CASE("clean delay bound at load 0.4, n=16") {
  auto c = small_config("qps:r=1", Pattern::uniform, 0.4, 16);
  const auto r = run(c);
  CHECK(r.converged);
  CHECK(r.mean_delay + r.delay_ci_halfwidth <= 5.0);
  CHECK(r.throughput == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("Little's law") {
  auto c = small_config("qps:r=1", Pattern::uniform, 0.3, 16);
  const auto r = run(c);
  const auto check = littles_law_check(r, r.offered_rate);
  CHECK_FALSE(check.flagged);
  CHECK(check.discrepancy <= 0.02);

  CHECK(littles_law_check(SimResult{}, 0.0).discrepancy == 0.0);

  auto t = small_config("qps:r=1", Pattern::uniform, 0.95, 16);
  t.stopping.max_slots = 100;
  const auto truncated = run(t);
  const auto bad = littles_law_check(truncated, truncated.offered_rate);
  CHECK(bad.flagged);
  CHECK(bad.discrepancy > 0.05);
}

TEST_CASE("warm-up discarding shifts the measured window") {
  auto c = small_config("qps:r=1", Pattern::uniform, 0.4);
  c.stopping.discard_warmup = true;
  const auto r = run(c);
  CHECK(r.slots_run >= 2 * c.min_slots());
  CHECK(r.measured_slots == r.slots_run - c.min_slots());
}

TEST_CASE("maximal schedulers never violate the departure property; QPS can") {
  auto c = small_config("greedy", Pattern::diagonal, 0.8, 16);
  c.check_departure_property = true;
  c.stopping.max_slots = 20000;
  CHECK(run(c).property_violations == 0);
  c.scheduler = SchedulerSpec::parse("qps:r=1");
  CHECK(run(c).property_violations > 0);
}

TEST_CASE("batch means") {
  BatchMeans bm(4, 4);
  for (int t = 0; t < 64; ++t) {
    bm.record(t % 2 == 0 ? 1.0 : 3.0, 1.0);
    bm.end_slot();
  }
  CHECK(bm.mean() == doctest::Approx(2.0));
  CHECK(bm.batches() >= 4);
  CHECK(bm.batches() < 8);
  CHECK(bm.halfwidth(0.95) == doctest::Approx(0.0));
  CHECK(BatchMeans(10).halfwidth(0.95) == std::numeric_limits<double>::infinity());
  CHECK(student_t_critical(0.95, 30) == doctest::Approx(2.042).epsilon(1e-3));
  CHECK(student_t_critical(0.98, 63) == doctest::Approx(2.387).epsilon(1e-3));
}

TEST_CASE("every scheduler is stable at load 0.45 on every pattern") {
  for (const char* sched : {"qps:r=1", "qps:r=3", "islip", "mwm", "greedy"})
    for (auto p : {Pattern::uniform, Pattern::quasi_diagonal, Pattern::log_diagonal, Pattern::diagonal}) {
      auto c = small_config(sched, p, 0.45, 8);
      bool flagged = false;
      const auto probe = probe_load(c, 60000, flagged);
      INFO(sched, " ", to_string(p), " ratio ", probe.ratio);
      CHECK(probe.sustainable);
    }
}

TEST_CASE("growth probe detects overload") {
  auto c = small_config("qps:r=1", Pattern::uniform, 0.95, 8);
  const auto p = probe_growth(c, 30000);
  CHECK_FALSE(p.sustainable);
  CHECK(p.ratio > kGrowthThreshold);
}

TEST_CASE("throughput search argument checks and MWM stays stable at 0.95") {
  auto c = small_config("mwm", Pattern::uniform, 0.5, 16);
  CHECK_THROWS_AS(throughput_search(c, 0.9, 0.8, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(throughput_search(c, 0.5, 0.9, 0.0), std::invalid_argument);
  c.load = 0.95;
  bool flagged = false;
  CHECK(probe_load(c, c.min_slots(), flagged).sustainable);
}
