#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "qpsim/moments.hpp"
#include "qpsim/sources.hpp"
#include "qpsim/traffic.hpp"

namespace qpsim {

struct BoundsRequest {
  Pattern pattern = Pattern::uniform;
  std::size_t n = 2;
  double load = 0.4;
  SourceSpec source;
  /// Both required for the Markovian bound.
  std::optional<double> xi;
  std::optional<std::size_t> k;
  /// Slots used to estimate moments of sources without closed forms (onoff).
  std::size_t estimate_slots = 200000;
  std::uint64_t seed = 1;
};

/// A bound value or the reason it does not apply.
struct BoundValue {
  std::optional<double> value;
  std::string reason;
};

struct BoundsReport {
  TrafficRateMatrix lambda;
  double rho = 0.0;
  double total_rate = 0.0;
  bool iid = true;
  MomentProfile moments;
  BoundValue iid_queue;      // i.i.d. queue-length bound
  BoundValue clean_delay;    // 1/(1-2 rho), Bernoulli only
  BoundValue markov_queue;   // independent-Markovian queue-length bound
};

/// Evaluates every applicable bound; out-of-regime bounds carry a reason
/// instead of a value.
BoundsReport evaluate_bounds(const BoundsRequest& request);

/// Human-readable table: rates summary, rho, Lambda-dagger grid, bounds.
void print_bounds(std::ostream& out, const BoundsReport& report);

}  // namespace qpsim
