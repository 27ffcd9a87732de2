#include "qpsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qpsim {

Count lyapunov(const QueueMatrix& q) {
  Count l = 0;
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (q(i, j) != 0) l += q(i, j) * q.neighborhood(i, j);
  return l;
}

namespace {

template <typename Scalar>
Scalar ratio(Count num, Count den) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return static_cast<double>(num) / static_cast<double>(den);
  } else {
    return Scalar(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }
}

template <typename Scalar>
class Qps1Enumerator {
 public:
  explicit Qps1Enumerator(const QueueMatrix& q) : q_(q), n_(q.size()), proposal_(n_, -1), winner_(n_, -1) {
    out_.n = n_;
    out_.expected_departures.assign(n_ * n_, Scalar(0));
    out_.acceptance_prob.assign(n_ * n_, Scalar(0));
    out_.proposal_prob.assign(n_ * n_, Scalar(0));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (q_(i, j) > 0) out_.proposal_prob[i * n_ + j] = ratio<Scalar>(q_(i, j), q_.row_sum(i));
  }

  BasicQpsOracleResult<Scalar> run() {
    propose(0, Scalar(1));
    for (std::size_t c = 0; c < n_ * n_; ++c)
      if (out_.proposal_prob[c] != Scalar(0)) out_.acceptance_prob[c] = out_.expected_departures[c] / out_.proposal_prob[c];
    return std::move(out_);
  }

 private:
  // Proposing phase: input i proposes to j with probability q_ij / Q_i*, or abstains if its row is empty.
  void propose(std::size_t i, Scalar p) {
    if (i == n_) {
      contenders_.assign(n_, {});
      for (std::size_t k = 0; k < n_; ++k)
        if (proposal_[k] >= 0) contenders_[static_cast<std::size_t>(proposal_[k])].push_back(k);
      // Keep only the longest-VOQ proposers at each output.
      for (std::size_t j = 0; j < n_; ++j) {
        auto& c = contenders_[j];
        if (c.empty()) continue;
        Count best = 0;
        for (auto k : c) best = std::max(best, q_(k, j));
        std::erase_if(c, [&](std::size_t k) { return q_(k, j) != best; });
      }
      accept(0, p);
      return;
    }
    if (q_.row_sum(i) == 0) {
      proposal_[i] = -1;
      propose(i + 1, p);
      return;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (q_(i, j) == 0) continue;
      proposal_[i] = static_cast<std::int64_t>(j);
      propose(i + 1, p * out_.proposal_prob[i * n_ + j]);
    }
    proposal_[i] = -1;
  }

  // Accepting phase: output j picks uniformly among its tied longest proposals.
  void accept(std::size_t j, Scalar p) {
    if (j == n_) {
      record(p);
      return;
    }
    const auto& c = contenders_[j];
    if (c.empty()) {
      winner_[j] = -1;
      accept(j + 1, p);
      return;
    }
    const Scalar share = p / Scalar(static_cast<std::int64_t>(c.size()));
    for (auto k : c) {
      winner_[j] = static_cast<std::int64_t>(k);
      accept(j + 1, share);
    }
    winner_[j] = -1;
  }

  void record(const Scalar& p) {
    ++out_.outcome_count;
    std::vector<Count> row_dep(n_, 0), col_dep(n_, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (winner_[j] < 0) continue;
      const auto i = static_cast<std::size_t>(winner_[j]);
      out_.expected_departures[i * n_ + j] += p;
      row_dep[i] = 1;
      col_dep[j] = 1;
    }
    Count weighted = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        if (q_(i, j) == 0) continue;
        const Count d = winner_[j] == static_cast<std::int64_t>(i) ? 1 : 0;
        weighted += q_(i, j) * (row_dep[i] + col_dep[j] - d);
      }
    out_.weighted_dagger_sum += p * Scalar(static_cast<std::int64_t>(weighted));
  }

  const QueueMatrix& q_;
  std::size_t n_;
  std::vector<std::int64_t> proposal_;
  std::vector<std::int64_t> winner_;
  std::vector<std::vector<std::size_t>> contenders_;
  BasicQpsOracleResult<Scalar> out_;
};

}  // namespace

QpsOracleResult exact_qps1_expectation(const QueueMatrix& q) {
  if (q.size() > kOracleMaxPorts)
    throw std::invalid_argument("exact_qps1_expectation: n = " + std::to_string(q.size()) + " exceeds enumeration limit " +
                                std::to_string(kOracleMaxPorts));
  return Qps1Enumerator<double>(q).run();
}

RationalOracleResult exact_qps1_expectation_rational(const QueueMatrix& q) {
  if (q.size() > kRationalOracleMaxPorts)
    throw std::invalid_argument("exact_qps1_expectation_rational: n = " + std::to_string(q.size()) +
                                " exceeds enumeration limit " + std::to_string(kRationalOracleMaxPorts));
  return Qps1Enumerator<Rational>(q).run();
}

WeakDepartureCheck verify_weak_departure_inequality(const QueueMatrix& q) {
  const auto oracle = exact_qps1_expectation(q);
  WeakDepartureCheck c;
  c.lhs = oracle.weighted_dagger_sum;
  c.rhs = static_cast<double>(q.total());
  c.holds = c.lhs >= c.rhs - kOracleTolerance;
  return c;
}

bool verify_strong_departure(const QueueMatrix& q, const DepartureMatrix& d) {
  const std::size_t n = q.size();
  if (d.size() != n) throw DimensionError("verify_strong_departure: dimension mismatch");
  std::vector<Count> rows(n), cols(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = d.row_sum(i);
  for (std::size_t j = 0; j < n; ++j) cols[j] = d.col_sum(j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Count dagger = rows[i] + cols[j] - d(i, j);
      if (q(i, j) * dagger < q(i, j)) return false;
    }
  return true;
}

double iid_queue_bound(const TrafficRateMatrix& lambda, std::span<const double> sigma2) {
  const std::size_t n = lambda.size();
  if (sigma2.size() != n * n) throw DimensionError("iid_queue_bound: sigma2 must have n*n entries");
  const double rho = lambda.load_factor();
  if (rho >= 0.5) throw std::domain_error("iid_queue_bound: undefined for rho >= 1/2");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double l = lambda(i, j);
      if (!std::isfinite(sigma2[i * n + j])) throw std::domain_error("iid_queue_bound: variance must be finite");
      sum += sigma2[i * n + j] - l * lambda.neighborhood(i, j) + l;
    }
  return sum / (2.0 * (1.0 - 2.0 * rho));
}

double bernoulli_delay_bound(double rho) {
  if (rho < 0.0) throw std::domain_error("bernoulli_delay_bound: rho must be nonnegative");
  if (rho >= 0.5) throw std::domain_error("bernoulli_delay_bound: undefined for rho >= 1/2");
  return 1.0 / (1.0 - 2.0 * rho);
}

double markovian_queue_bound(const MarkovBoundInputs& in) {
  if (!(in.xi < 1.0)) throw std::domain_error("markovian_queue_bound: undefined for xi >= 1");
  if (in.k < 1) throw std::invalid_argument("markovian_queue_bound: k must be >= 1");
  const std::size_t n = in.lambda.size();
  if (in.moments.n != n) throw DimensionError("markovian_queue_bound: moment profile size mismatch");
  if (in.moments.max_lag < in.k) throw std::invalid_argument("markovian_queue_bound: moment profile has fewer than k lags");

  double level = 0.0;
  double lagged = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double l = in.lambda(i, j);
      const double ld = l * in.lambda.neighborhood(i, j);
      level += in.moments.sigma2(i, j) + ld + l;
      for (std::size_t lag = 1; lag <= in.k; ++lag) lagged += ld + in.moments.theta(i, j, lag);
    }
  return (level + 2.0 * lagged) / (2.0 * (1.0 - in.xi));
}

DriftEstimate drift_estimate(const QueueMatrix& q, Scheduler& scheduler, ArrivalSource& source, std::size_t samples) {
  if (samples < 1000) throw std::invalid_argument("drift_estimate: need at least 1000 samples");
  if (source.size() != q.size()) throw DimensionError("drift_estimate: source size mismatch");
  const double base = static_cast<double>(lyapunov(q));
  ArrivalMatrix a(q.size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    QueueMatrix next = q;
    const auto m = scheduler.schedule(q);
    for (const auto& e : m.edges())
      if (next(e.input, e.output) > 0) next.decrement(e.input, e.output);
    source.next(a);
    for (const auto& e : a.nonzero()) next.increment(e.input, e.output, a(e.input, e.output));
    const double delta = static_cast<double>(lyapunov(next)) - base;
    sum += delta;
    sum_sq += delta * delta;
  }
  DriftEstimate est;
  est.samples = samples;
  const double k = static_cast<double>(samples);
  est.mean_drift = sum / k;
  const double var = std::max(0.0, (sum_sq - k * est.mean_drift * est.mean_drift) / (k - 1.0));
  est.ci_halfwidth = 1.959963984540054 * std::sqrt(var / k);
  return est;
}

}  // namespace qpsim
