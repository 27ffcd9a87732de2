#pragma once

#include <boost/rational.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qpsim/matrix.hpp"
#include "qpsim/moments.hpp"
#include "qpsim/schedulers.hpp"
#include "qpsim/sources.hpp"
#include "qpsim/traffic.hpp"

namespace qpsim {

/// Sum over all VOQs of q_ij * Q-dagger_ij.
Count lyapunov(const QueueMatrix& q);

/// Largest switch size the exact QPS-1 oracle will enumerate.
inline constexpr std::size_t kOracleMaxPorts = 6;
/// Largest switch size for the exact-rational oracle.
inline constexpr std::size_t kRationalOracleMaxPorts = 3;

/// Exact conditional expectations of one QPS-1 round given Q, obtained by
/// enumerating every proposal vector and every uniform tie-break.
template <typename Scalar>
struct BasicQpsOracleResult {
  std::size_t n = 0;
  std::vector<Scalar> expected_departures;  // E[d_ij | Q]
  std::vector<Scalar> acceptance_prob;      // alpha_ij; 0 where i never proposes to j
  std::vector<Scalar> proposal_prob;        // q_ij / Q_i*
  Scalar weighted_dagger_sum{};             // sum_ij E[q_ij D-dagger_ij | Q]
  std::uint64_t outcome_count = 0;

  const Scalar& departure(std::size_t i, std::size_t j) const { return expected_departures[i * n + j]; }
  const Scalar& alpha(std::size_t i, std::size_t j) const { return acceptance_prob[i * n + j]; }
  const Scalar& proposal(std::size_t i, std::size_t j) const { return proposal_prob[i * n + j]; }
};

using QpsOracleResult = BasicQpsOracleResult<double>;
using Rational = boost::rational<std::int64_t>;
using RationalOracleResult = BasicQpsOracleResult<Rational>;

/// Requires q.size() <= kOracleMaxPorts.
QpsOracleResult exact_qps1_expectation(const QueueMatrix& q);
/// Requires q.size() <= kRationalOracleMaxPorts.
RationalOracleResult exact_qps1_expectation_rational(const QueueMatrix& q);

struct WeakDepartureCheck {
  double lhs = 0.0;  // sum_ij E[q_ij D-dagger_ij | Q]
  double rhs = 0.0;  // ||Q||_1
  bool holds = false;
};

inline constexpr double kOracleTolerance = 1e-9;

WeakDepartureCheck verify_weak_departure_inequality(const QueueMatrix& q);

/// q_ij * D-dagger_ij >= q_ij for every cell.
bool verify_strong_departure(const QueueMatrix& q, const DepartureMatrix& d);

/// Mean total queue bound for QPS-1 under i.i.d. arrivals:
/// (1 / (2(1 - 2 rho))) * sum_ij (sigma2_ij - lambda_ij Lambda-dagger_ij + lambda_ij).
/// sigma2 is row-major n*n. Throws std::domain_error when rho >= 1/2.
double iid_queue_bound(const TrafficRateMatrix& lambda, std::span<const double> sigma2);

/// Mean delay bound 1 / (1 - 2 rho) for Bernoulli arrivals. Throws std::domain_error when rho >= 1/2.
double bernoulli_delay_bound(double rho);

struct MarkovBoundInputs {
  TrafficRateMatrix lambda;
  MomentProfile moments;  // sigma^2 and theta(1..k); moments.max_lag >= k
  double xi = 0.0;        // load proxy after k slots of mixing, < 1
  std::size_t k = 1;
};

/// Mean total queue bound for QPS-1 under independent Markovian arrivals:
/// (1/(2(1 - xi))) * [ sum_ij (sigma2 + lambda Lambda-dagger + lambda)
///                     + 2 sum_ij sum_{l=1..k} (lambda Lambda-dagger + theta(l)) ].
/// Throws std::domain_error when xi >= 1.
double markovian_queue_bound(const MarkovBoundInputs& inputs);

struct DriftEstimate {
  double mean_drift = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal-approximation half-width
  std::size_t samples = 0;
};

/// Monte Carlo estimate of E[L(Q(t+1)) - L(Q(t)) | Q(t) = q] over the
/// scheduler's and the source's randomness. Requires samples >= 1000.
DriftEstimate drift_estimate(const QueueMatrix& q, Scheduler& scheduler, ArrivalSource& source, std::size_t samples);

}  // namespace qpsim
