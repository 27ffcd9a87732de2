#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qpsim/markov.hpp"
#include "qpsim/sources.hpp"
#include "qpsim/traffic.hpp"

namespace qpsim {

/// Steady-state first and second moments of each a_ij(t).
struct MomentProfile {
  std::size_t n = 0;
  std::size_t max_lag = 0;
  std::vector<double> mean;      // n*n
  std::vector<double> variance;  // n*n, sigma^2_ij
  std::vector<double> autocov;   // n*n*max_lag, theta_ij(k) at [(i*n+j)*max_lag + (k-1)]

  MomentProfile() = default;
  MomentProfile(std::size_t n, std::size_t max_lag)
      : n(n), max_lag(max_lag), mean(n * n, 0.0), variance(n * n, 0.0), autocov(n * n * max_lag, 0.0) {}

  double sigma2(std::size_t i, std::size_t j) const { return variance[i * n + j]; }
  /// k in [1, max_lag].
  double theta(std::size_t i, std::size_t j, std::size_t k) const { return autocov[(i * n + j) * max_lag + (k - 1)]; }
};

/// Sample mean, variance and lag-1..max_lag autocovariance from `slots`
/// consecutive draws of `source`. Requires slots >= 10^4.
MomentProfile estimate_moments(ArrivalSource& source, std::size_t slots, std::size_t max_lag);

/// Exact moments for independent Bernoulli cells: sigma^2 = lambda - lambda^2, theta = 0.
MomentProfile bernoulli_moments(const TrafficRateMatrix& lambda, std::size_t max_lag);

/// Exact stationary moments of a Markov-modulated source:
/// theta(k) = pi diag(e) P^k e - rate^2.
MomentProfile analytic_moments(const MarkovSpec& spec, std::size_t max_lag);

}  // namespace qpsim
