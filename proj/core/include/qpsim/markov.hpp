#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpsim/sampler.hpp"

namespace qpsim {

/// Finite modulating chain: a_ij(t) = emission[x_ij(t)].
struct MarkovChain {
  std::string name;
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<Count> emission;

  std::size_t states() const { return emission.size(); }
  /// Throws std::invalid_argument on shape errors or non-stochastic rows.
  void validate(double tol = 1e-9) const;
  /// Stationary law pi (pi P = pi, sum pi = 1). Requires an irreducible chain.
  std::vector<double> stationary() const;
  /// Mean emission under the stationary law.
  double rate() const;
};

/// Per-VOQ assignment of chains for an n-port switch. VOQs without a chain
/// never receive packets; chains evolve independently per VOQ.
struct MarkovSpec {
  std::size_t ports = 0;
  Count a_max = 1;
  std::vector<MarkovChain> chains;
  std::vector<int> assignment;  // ports*ports entries; index into chains or -1

  int chain_of(std::size_t i, std::size_t j) const { return assignment[i * ports + j]; }
  void validate() const;

  /// Text format, one directive per line ('#' starts a comment):
  ///   ports <n>
  ///   a_max <k>
  ///   chain <name>
  ///     row <p_0> ... <p_{s-1}>      (one per state)
  ///     emit <e_0> ... <e_{s-1}>
  ///   end
  ///   assign * <name>               (every VOQ)
  ///   assign <i> <j> <name>         (one VOQ, 0-based)
  /// Later assign lines override earlier ones.
  static MarkovSpec parse(std::istream& in);
  static MarkovSpec load(const std::string& path);
};

}  // namespace qpsim
