#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "qpsim/matching.hpp"
#include "qpsim/matrix.hpp"
#include "qpsim/schedulers.hpp"
#include "qpsim/sources.hpp"
#include "qpsim/traffic.hpp"

namespace qpsim {

struct StoppingRule {
  /// Minimum run length is ceil(min_slots_factor * N^2) slots.
  double min_slots_factor = 500.0;
  /// Stop once the CI half-width of the mean delay is <= this fraction of it.
  double relative_precision = 0.01;
  double confidence = 0.98;
  /// Hard cap; 0 means 20x the minimum run length. A cap below the minimum
  /// truncates the run, which then reports converged = false.
  std::uint64_t max_slots = 0;
  /// Exclude the first minimum-length stretch from all measurements.
  bool discard_warmup = false;
};

struct SimConfig {
  std::size_t n = 16;
  SchedulerSpec scheduler;
  SourceSpec source;
  Pattern pattern = Pattern::uniform;
  double load = 0.5;
  std::uint64_t seed = 1;
  StoppingRule stopping;
  /// Count, every slot, VOQs with q_ij > 0 whose cross carries no departure.
  bool check_departure_property = false;

  /// Throws std::invalid_argument when out of range.
  void validate() const;
  std::uint64_t min_slots() const;
  std::uint64_t max_slots() const;
  TrafficRateMatrix rates() const;
};

struct SimResult {
  double mean_delay = 0.0;
  double delay_ci_halfwidth = 0.0;
  double mean_total_queue = 0.0;
  double queue_ci_halfwidth = 0.0;
  std::uint64_t slots_run = 0;
  std::uint64_t measured_slots = 0;
  std::uint64_t packets_arrived = 0;
  std::uint64_t packets_departed = 0;
  std::uint64_t final_backlog = 0;
  /// Departures per slot per port over the measured window.
  double throughput = 0.0;
  /// Sum of lambda_ij for the configured traffic.
  double offered_rate = 0.0;
  bool converged = false;
  std::uint64_t property_violations = 0;
};

/// Derives independent stream seeds from one run seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Slot-by-slot engine. Each step: schedule on Q(t), send the head packet of
/// every matched nonempty VOQ, then add the slot's arrivals stamped t. A
/// packet that arrived in slot s and leaves in slot t has delay t - s >= 1.
class Simulation {
 public:
  struct Options {
    bool track_delay = true;
    bool check_departure_property = false;
  };

  struct SlotReport {
    Count queue_before = 0;  // ||Q(t)||_1 seen by the scheduler
    Count departures = 0;
    Count arrivals = 0;
    double delay_sum = 0.0;
    std::uint64_t property_violations = 0;
  };

  using DepartureHook = std::function<void(Edge voq, std::int64_t arrival_slot, std::uint64_t departure_slot)>;

  Simulation(std::unique_ptr<Scheduler> scheduler, std::unique_ptr<ArrivalSource> source, Options options);
  Simulation(std::unique_ptr<Scheduler> scheduler, std::unique_ptr<ArrivalSource> source);
  /// Initial backlog packets are stamped as arriving in slot -1.
  Simulation(std::unique_ptr<Scheduler> scheduler, std::unique_ptr<ArrivalSource> source, const QueueMatrix& initial,
             Options options);

  SlotReport step();

  const QueueMatrix& queues() const { return q_; }
  const Matching& last_matching() const { return last_matching_; }
  std::uint64_t slot() const { return slot_; }
  std::uint64_t arrived() const { return arrived_; }
  std::uint64_t departed() const { return departed_; }
  std::uint64_t initial_backlog() const { return initial_backlog_; }
  void on_departure(DepartureHook hook) { hook_ = std::move(hook); }

 private:
  std::size_t n_;
  std::unique_ptr<Scheduler> scheduler_;
  std::unique_ptr<ArrivalSource> source_;
  Options options_;
  QueueMatrix q_;
  std::vector<std::deque<std::int64_t>> fifo_;
  ArrivalMatrix arrivals_;
  Matching last_matching_;
  PortSet busy_in_, busy_out_;
  std::uint64_t slot_ = 0;
  std::uint64_t arrived_ = 0;
  std::uint64_t departed_ = 0;
  std::uint64_t initial_backlog_ = 0;
  DepartureHook hook_;
};

/// Runs one configuration under the stopping rule.
SimResult run(const SimConfig& config);

struct LittleCheck {
  double discrepancy = 0.0;
  /// Set when the run did not converge; the discrepancy is then not meaningful.
  bool flagged = false;
};

/// |mean_queue - lambda_total * mean_delay| / mean_queue, 0 when both sides are 0.
LittleCheck littles_law_check(const SimResult& result, double lambda_total);

// ---------------------------------------------------------------------------
// Throughput knee

/// Ratio of last-third to middle-third mean queue length above which a probe
/// counts as growing.
inline constexpr double kGrowthThreshold = 1.2;
/// Probes whose ratio lands in [kAmbiguousLow, kAmbiguousHigh] are retried once
/// at double length.
inline constexpr double kAmbiguousLow = 1.1;
inline constexpr double kAmbiguousHigh = 1.3;

struct GrowthProbe {
  double load = 0.0;
  double middle_mean = 0.0;
  double last_mean = 0.0;
  double ratio = 0.0;
  std::uint64_t slots = 0;
  bool sustainable = false;
  bool ambiguous = false;
};

/// Runs config (delay tracking off) for `slots` slots and compares the mean
/// total queue over the last third against the middle third.
GrowthProbe probe_growth(const SimConfig& config, std::uint64_t slots);

/// probe_growth with the ambiguous-band retry; `flagged` reports a second
/// ambiguous outcome.
GrowthProbe probe_load(const SimConfig& config, std::uint64_t slots, bool& flagged);

struct KneeResult {
  double knee = 0.0;
  bool flagged = false;
  std::vector<GrowthProbe> probes;
};

/// Bisection on offered load between lo (sustainable) and hi; each probe
/// runs config.min_slots() slots. Requires 0 < lo < hi < 1.
KneeResult throughput_search(const SimConfig& config, double lo, double hi, double tolerance);

}  // namespace qpsim
