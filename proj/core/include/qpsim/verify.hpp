#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "qpsim/schedulers.hpp"

namespace qpsim {

using SchedulerFactory = std::function<std::unique_ptr<Scheduler>(std::size_t n, std::uint64_t seed)>;

/// A scheduler that never matches anything. Fault injection for the verifier.
std::unique_ptr<Scheduler> make_never_match_scheduler();

struct VerifyOptions {
  std::size_t n_max = 4;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  /// Scheduler exercised by the Monte Carlo weak-inequality check; QPS-1 when empty.
  SchedulerFactory weak_under_test;
  /// Scheduler exercised by the strong (maximal-matching) check; greedy when empty.
  SchedulerFactory strong_under_test;
};

struct VerifyCheck {
  std::string name;
  std::size_t n = 0;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst_lhs = 0.0;  // at the instance with the smallest lhs - rhs margin
  double worst_rhs = 0.0;
  bool pass() const { return failures == 0; }
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  std::vector<std::string> warnings;
  bool pass() const;
};

/// Runs the exact-oracle sweep of the weak departure inequality, oracle
/// self-consistency, Monte Carlo agreement of the scheduler under test,
/// strong departure checks, departure-matrix facts, a sampler goodness-of-fit
/// test and a Little's-law check. Requires n_max in [2, 6].
VerifyReport run_verification(const VerifyOptions& options);

/// CSV: check,n,instances,failures,worst_lhs,worst_rhs,pass
void write_verify_csv(std::ostream& out, const VerifyReport& report);

}  // namespace qpsim
