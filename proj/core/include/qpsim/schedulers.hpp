#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qpsim/matching.hpp"
#include "qpsim/matrix.hpp"
#include "qpsim/sampler.hpp"

namespace qpsim {

/// Parsed form of "qps:r=3", "islip:iters=6", "mwm", "greedy".
struct SchedulerSpec {
  enum class Kind { qps, islip, mwm, greedy };

  Kind kind = Kind::qps;
  /// QPS iterations r, or iSLIP iterations; 0 for iSLIP means ceil(log2 N).
  unsigned iterations = 3;

  static SchedulerSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const SchedulerSpec&, const SchedulerSpec&) = default;
};

/// ceil(log2 n), at least 1.
unsigned default_islip_iterations(std::size_t n);

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Matching schedule(const QueueMatrix& q) = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSpec& spec, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// QPS-r

/// Per-call scratch space; reuse across slots to avoid allocation.
struct QpsWorkspace {
  std::vector<std::int64_t> output_match;  // input matched to each output, or -1
  std::vector<std::int64_t> input_match;
  std::vector<std::int64_t> best_input;    // current accepted proposer per output this round
  std::vector<Count> best_value;
  std::vector<std::uint32_t> ties;
  std::vector<std::size_t> touched;
};

/// r rounds of queue-proportional proposing and longest-VOQ-first accepting.
/// Each still-unmatched input with packets samples an output over its full
/// row (with replacement across rounds); each still-unmatched output accepts
/// the proposal carrying the largest VOQ length, ties uniformly at random.
Matching qps_r_schedule(const QueueMatrix& q, unsigned r, Rng& rng);
Matching qps_r_schedule(const QueueMatrix& q, unsigned r, Rng& rng, QpsWorkspace& ws);

class QpsScheduler final : public Scheduler {
 public:
  QpsScheduler(unsigned r, std::uint64_t seed);
  Matching schedule(const QueueMatrix& q) override;
  std::string name() const override;

 private:
  unsigned r_;
  Rng rng_;
  QpsWorkspace ws_;
};

// ---------------------------------------------------------------------------
// iSLIP

/// Round-robin positions, 0-based: grant[j] for output j, accept[i] for input i.
struct IslipPointers {
  explicit IslipPointers(std::size_t n = 0) : grant(n, 0), accept(n, 0) {}
  std::vector<std::size_t> grant;
  std::vector<std::size_t> accept;
};

Matching islip_schedule(const QueueMatrix& q, unsigned iterations, IslipPointers& state);

class IslipScheduler final : public Scheduler {
 public:
  IslipScheduler(std::size_t n, unsigned iterations);
  Matching schedule(const QueueMatrix& q) override;
  std::string name() const override;
  const IslipPointers& pointers() const { return pointers_; }

 private:
  unsigned iterations_;
  IslipPointers pointers_;
};

// ---------------------------------------------------------------------------
// Maximum weight matching

/// Matching maximizing the sum of q_ij; only pairs with q_ij > 0 are returned.
/// Deterministic in q.
Matching mwm_schedule(const QueueMatrix& q);

class MwmScheduler final : public Scheduler {
 public:
  Matching schedule(const QueueMatrix& q) override { return mwm_schedule(q); }
  std::string name() const override { return "mwm"; }
};

// ---------------------------------------------------------------------------
// Greedy maximal matching

/// Scans nonempty VOQs in uniformly random order and keeps every edge whose
/// ports are both still free. The result is maximal.
Matching greedy_maximal_schedule(const QueueMatrix& q, Rng& rng);

class GreedyMaximalScheduler final : public Scheduler {
 public:
  explicit GreedyMaximalScheduler(std::uint64_t seed) : rng_(seed) {}
  Matching schedule(const QueueMatrix& q) override { return greedy_maximal_schedule(q, rng_); }
  std::string name() const override { return "greedy"; }

 private:
  Rng rng_;
};

}  // namespace qpsim
