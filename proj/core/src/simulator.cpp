#include "qpsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpsim/batch_means.hpp"

namespace qpsim {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SimConfig::validate() const {
  if (n < 2) throw std::invalid_argument("SimConfig: n must be >= 2");
  if (!(load > 0.0 && load < 1.0)) throw std::invalid_argument("SimConfig: load must lie in (0, 1)");
  if (!(stopping.relative_precision > 0.0)) throw std::invalid_argument("SimConfig: precision must be positive");
  if (!(stopping.confidence > 0.0 && stopping.confidence < 1.0))
    throw std::invalid_argument("SimConfig: confidence must lie in (0, 1)");
  if (!(stopping.min_slots_factor > 0.0)) throw std::invalid_argument("SimConfig: min_slots_factor must be positive");
}

std::uint64_t SimConfig::min_slots() const {
  return static_cast<std::uint64_t>(std::ceil(stopping.min_slots_factor * static_cast<double>(n * n)));
}

std::uint64_t SimConfig::max_slots() const {
  const std::uint64_t floor = min_slots() * (stopping.discard_warmup ? 2 : 1);
  // An explicit cap wins even below the minimum; such runs never converge.
  return stopping.max_slots == 0 ? 20 * floor : stopping.max_slots;
}

TrafficRateMatrix SimConfig::rates() const { return rate_matrix(pattern_matrix(pattern, n), load); }

// ---------------------------------------------------------------------------

Simulation::Simulation(std::unique_ptr<Scheduler> scheduler, std::unique_ptr<ArrivalSource> source, Options options)
    : n_(source->size()),
      scheduler_(std::move(scheduler)),
      source_(std::move(source)),
      options_(options),
      q_(n_),
      fifo_(options.track_delay ? n_ * n_ : 0),
      arrivals_(n_),
      busy_in_(n_),
      busy_out_(n_) {}

Simulation::Simulation(std::unique_ptr<Scheduler> scheduler, std::unique_ptr<ArrivalSource> source)
    : Simulation(std::move(scheduler), std::move(source), Options{}) {}

Simulation::Simulation(std::unique_ptr<Scheduler> scheduler, std::unique_ptr<ArrivalSource> source,
                       const QueueMatrix& initial, Options options)
    : Simulation(std::move(scheduler), std::move(source), options) {
  if (initial.size() != n_) throw DimensionError("Simulation: initial queue size mismatch");
  q_ = initial;
  initial_backlog_ = initial.total();
  if (options_.track_delay)
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) fifo_[i * n_ + j].assign(initial(i, j), -1);
}

Simulation::SlotReport Simulation::step() {
  SlotReport report;
  const auto t = static_cast<std::int64_t>(slot_);
  report.queue_before = q_.total();

  last_matching_ = scheduler_->schedule(q_);

  if (options_.check_departure_property) {
    busy_in_.clear();
    busy_out_.clear();
    for (const auto& e : last_matching_.edges())
      if (q_(e.input, e.output) > 0) {
        busy_in_.set(e.input);
        busy_out_.set(e.output);
      }
    PortSet idle_out(n_, true);
    busy_out_.for_each([&](std::size_t j) { idle_out.reset(j); });
    // A nonempty VOQ violates q_ij * D-dagger_ij >= q_ij iff neither of its ports sends.
    for (std::size_t i = 0; i < n_; ++i) {
      if (busy_in_.test(i)) continue;
      q_.nonempty_outputs(i).for_each([&](std::size_t j) {
        if (idle_out.test(j)) ++report.property_violations;
      });
    }
  }

  for (const auto& e : last_matching_.edges()) {
    if (q_(e.input, e.output) == 0) continue;
    q_.decrement(e.input, e.output);
    ++report.departures;
    if (options_.track_delay) {
      auto& fifo = fifo_[e.input * n_ + e.output];
      const std::int64_t stamp = fifo.front();
      fifo.pop_front();
      report.delay_sum += static_cast<double>(t - stamp);
      if (hook_) hook_(e, stamp, slot_);
    }
  }

  source_->next(arrivals_);
  for (const auto& a : arrivals_.nonzero()) {
    const Count k = arrivals_(a.input, a.output);
    q_.increment(a.input, a.output, k);
    report.arrivals += k;
    if (options_.track_delay) {
      auto& fifo = fifo_[a.input * n_ + a.output];
      for (Count c = 0; c < k; ++c) fifo.push_back(t);
    }
  }

  arrived_ += report.arrivals;
  departed_ += report.departures;
  ++slot_;
  return report;
}

// ---------------------------------------------------------------------------

SimResult run(const SimConfig& config) {
  config.validate();
  const auto lambda = config.rates();
  Simulation sim(make_scheduler(config.scheduler, config.n, derive_seed(config.seed, 0)),
                 make_source(config.source, lambda, derive_seed(config.seed, 1)),
                 Simulation::Options{true, config.check_departure_property});

  const std::uint64_t min_slots = config.min_slots();
  const std::uint64_t warmup = config.stopping.discard_warmup ? min_slots : 0;
  const std::uint64_t cap = config.max_slots();
  const double confidence = config.stopping.confidence;

  // 32 batches are complete once the minimum measured stretch is done.
  BatchMeans delay(std::max<std::uint64_t>(1, min_slots / 32));
  BatchMeans queue(std::max<std::uint64_t>(1, min_slots / 32));

  SimResult result;
  result.offered_rate = lambda.total();
  std::uint64_t departed_measured = 0;

  while (sim.slot() < cap) {
    const auto r = sim.step();
    result.property_violations += r.property_violations;
    if (sim.slot() <= warmup) continue;

    delay.record(r.delay_sum, static_cast<double>(r.departures));
    queue.record(static_cast<double>(r.queue_before), 1.0);
    departed_measured += r.departures;
    delay.end_slot();
    const bool batch_done = queue.end_slot();

    if (batch_done && sim.slot() >= warmup + min_slots) {
      const double m = delay.mean();
      if (m > 0.0 && delay.halfwidth(confidence) <= config.stopping.relative_precision * m) {
        result.converged = true;
        break;
      }
    }
  }

  result.slots_run = sim.slot();
  result.measured_slots = sim.slot() - std::min(sim.slot(), warmup);
  result.mean_delay = delay.mean();
  result.delay_ci_halfwidth = delay.halfwidth(confidence);
  result.mean_total_queue = queue.mean();
  result.queue_ci_halfwidth = queue.halfwidth(confidence);
  result.packets_arrived = sim.arrived();
  result.packets_departed = sim.departed();
  result.final_backlog = sim.queues().total();
  if (result.measured_slots > 0)
    result.throughput = static_cast<double>(departed_measured) /
                        (static_cast<double>(result.measured_slots) * static_cast<double>(config.n));
  return result;
}

LittleCheck littles_law_check(const SimResult& result, double lambda_total) {
  LittleCheck check;
  check.flagged = !result.converged;
  const double rhs = lambda_total * result.mean_delay;
  if (result.mean_total_queue == 0.0) {
    check.discrepancy = rhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return check;
  }
  check.discrepancy = std::abs(result.mean_total_queue - rhs) / result.mean_total_queue;
  return check;
}

}  // namespace qpsim
