#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "qpsim/matrix.hpp"

namespace testing {

inline qpsim::QueueMatrix random_queue(std::size_t n, std::mt19937_64& rng, double fill = 0.6, qpsim::Count max_len = 9) {
  qpsim::QueueMatrix q(n);
  std::bernoulli_distribution on(fill);
  std::uniform_int_distribution<qpsim::Count> len(1, max_len);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (on(rng)) q.set(i, j, len(rng));
  return q;
}

// Best weight over all n! permutations.
inline qpsim::Count brute_force_max_weight(const qpsim::QueueMatrix& q) {
  std::vector<std::size_t> perm(q.size());
  std::iota(perm.begin(), perm.end(), 0);
  qpsim::Count best = 0;
  do {
    qpsim::Count w = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) w += q(i, perm[i]);
    best = std::max(best, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Pearson statistic of observed counts against expected probabilities.
inline double chi_square(const std::vector<double>& counts, const std::vector<double>& probs) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (probs[k] == 0.0) continue;
    const double e = total * probs[k];
    stat += (counts[k] - e) * (counts[k] - e) / e;
  }
  return stat;
}

// |p_hat - p| within z standard errors of a binomial proportion.
inline bool within_binomial(double hits, double trials, double p, double z = 3.0) {
  const double se = std::sqrt(p * (1.0 - p) / trials);
  return std::abs(hits / trials - p) <= z * se + 1e-12;
}

}  // namespace testing
