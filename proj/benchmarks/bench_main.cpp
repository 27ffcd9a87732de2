#include <benchmark/benchmark.h>

#include "qpsim/schedulers.hpp"
#include "qpsim/simulator.hpp"
#include "qpsim/sources.hpp"

namespace {

using namespace qpsim;

QueueMatrix loaded_queue(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  QueueMatrix q(n);
  std::uniform_int_distribution<Count> len(0, 12);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q.set(i, j, len(rng));
  return q;
}

void BM_SamplerDraw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Count> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = 1 + j % 7;
  const ProportionalSampler s(w);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(rng));
}
BENCHMARK(BM_SamplerDraw)->RangeMultiplier(4)->Range(8, 512);

void BM_SamplerUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ProportionalSampler s(std::vector<Count>(n, 3));
  std::size_t j = 0;
  for (auto _ : state) {
    s.add(j, 1);
    s.subtract(j, 1);
    j = (j + 1) % n;
  }
}
BENCHMARK(BM_SamplerUpdate)->RangeMultiplier(4)->Range(8, 512);

void BM_Scheduler(benchmark::State& state, const char* spec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = loaded_queue(n, 2);
  auto s = make_scheduler(SchedulerSpec::parse(spec), n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(s->schedule(q));
}
BENCHMARK_CAPTURE(BM_Scheduler, qps1, "qps:r=1")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK_CAPTURE(BM_Scheduler, qps3, "qps:r=3")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK_CAPTURE(BM_Scheduler, islip, "islip")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK_CAPTURE(BM_Scheduler, greedy, "greedy")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK_CAPTURE(BM_Scheduler, mwm, "mwm")->RangeMultiplier(2)->Range(16, 64);

void BM_BernoulliSlot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  BernoulliSource src(rate_matrix(pattern_matrix(Pattern::log_diagonal, n), 0.8), 4);
  ArrivalMatrix a(n);
  for (auto _ : state) {
    src.next(a);
    benchmark::DoNotOptimize(a.total());
  }
}
BENCHMARK(BM_BernoulliSlot)->RangeMultiplier(4)->Range(16, 256);

void BM_OnOffSlot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  OnOffSource src(rate_matrix(pattern_matrix(Pattern::diagonal, n), 0.75), 64.0, 5);
  ArrivalMatrix a(n);
  for (auto _ : state) {
    src.next(a);
    benchmark::DoNotOptimize(a.total());
  }
}
BENCHMARK(BM_OnOffSlot)->RangeMultiplier(4)->Range(16, 256);

void BM_SimulationSlot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto lambda = rate_matrix(pattern_matrix(Pattern::uniform, n), 0.6);
  Simulation sim(make_scheduler(SchedulerSpec::parse("qps:r=1"), n, 6), std::make_unique<BernoulliSource>(lambda, 7));
  for (int t = 0; t < 2000; ++t) sim.step();
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_SimulationSlot)->Arg(16)->Arg(64);

}  // namespace
BENCHMARK_MAIN();
