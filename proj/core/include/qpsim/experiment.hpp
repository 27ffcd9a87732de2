#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsim/schedulers.hpp"
#include "qpsim/simulator.hpp"
#include "qpsim/sources.hpp"
#include "qpsim/traffic.hpp"

namespace qpsim {

/// Config parse failure; the message names the line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One [run] section: every list-valued key is a sweep axis.
struct RunTemplate {
  std::vector<SchedulerSpec> schedulers{SchedulerSpec{}};
  std::vector<Pattern> patterns{Pattern::uniform};
  std::vector<std::size_t> ports{16};
  std::vector<double> loads{0.5};
  /// Empty: use `source` as given. Otherwise each value b yields onoff:burst=b.
  std::vector<double> bursts;
  SourceSpec source;
  std::vector<std::uint64_t> seeds;  // empty: inherit experiment seeds
  StoppingRule stopping;
  bool check_departure_property = false;
  // Throughput-search bracket.
  double lo = 0.5;
  double hi = 0.95;
  double tolerance = 0.005;
  std::size_t line = 0;  // where the section starts
};

/// Parsed experiment file.
///
///   # comment
///   [experiment]
///   seeds = 1, 2
///   out = results.csv
///
///   [run]
///   scheduler = qps:r=1, islip
///   pattern = uniform, diagonal
///   n = 16
///   load = 0.1:0.1:0.4          # start:step:stop, inclusive
///   source = bernoulli
///   burst = 16, 64              # switches the source to onoff
///   min_slots_factor = 500
///   precision = 0.01
///   confidence = 0.98
///   max_slots = 0
///   discard_warmup = false
///   check_property = false
///   lo = 0.5                    # throughput search only
///   hi = 0.95
///   tolerance = 0.005
struct ExperimentConfig {
  std::vector<std::uint64_t> seeds{1};
  std::string out;
  std::vector<RunTemplate> runs;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
};

/// A fully specified run plus its position in expansion order.
struct ExpandedPoint {
  std::size_t index = 0;
  SimConfig config;
  double burst = 0.0;  // 0 for non-bursty sources
};

/// Cartesian product in the order scheduler, pattern, n, load, burst, seed;
/// seed_base is added to every seed.
std::vector<ExpandedPoint> expand(const ExperimentConfig& config, std::uint64_t seed_base = 0);

/// Runs every point on up to `jobs` worker threads (0: hardware concurrency).
/// Results are returned in expansion order regardless of completion order.
std::vector<SimResult> run_points(const std::vector<ExpandedPoint>& points, unsigned jobs);

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kResultsCsvVersion = "# qpsim results v1";
inline constexpr const char* kResultsCsvHeader =
    "scheduler,pattern,n,load,burst,seed,slots,mean_delay,ci,mean_queue,converged";
inline constexpr const char* kKneeCsvVersion = "# qpsim throughput v1";
inline constexpr const char* kKneeCsvHeader = "scheduler,pattern,n,burst,seed,lo,hi,tolerance,knee,probes,flagged";

struct ResultRow {
  std::string scheduler;
  std::string pattern;
  std::size_t n = 0;
  double load = 0.0;
  double burst = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t slots = 0;
  double mean_delay = 0.0;
  double ci = 0.0;
  double mean_queue = 0.0;
  bool converged = false;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

ResultRow make_row(const ExpandedPoint& point, const SimResult& result);
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Inverse of write_results_csv; throws ConfigError on malformed input.
std::vector<ResultRow> read_results_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Subcommand drivers

struct RunSummary {
  std::vector<ResultRow> rows;
  std::size_t non_converged = 0;
};

/// Axis overrides used by the sweep subcommands.
enum class SweepAxis { none, burst, ports, iterations };

/// Applies a sweep override: burst -> onoff bursts 16..1024 (powers of 2),
/// ports -> n in 8..512 (powers of 2), iterations -> qps r in 1..4.
void apply_sweep(ExperimentConfig& config, SweepAxis axis);

RunSummary run_experiment(const ExperimentConfig& config, unsigned jobs, std::uint64_t seed_base);

struct KneeRow {
  std::string scheduler;
  std::string pattern;
  std::size_t n = 0;
  double burst = 0.0;
  std::uint64_t seed = 0;
  double lo = 0.0, hi = 0.0, tolerance = 0.0;
  double knee = 0.0;
  std::size_t probes = 0;
  bool flagged = false;
};

/// One bisection per (scheduler, pattern, n, burst, seed); load lists are ignored.
std::vector<KneeRow> run_throughput(const ExperimentConfig& config, unsigned jobs, std::uint64_t seed_base);
void write_knee_csv(std::ostream& out, const std::vector<KneeRow>& rows);

}  // namespace qpsim
