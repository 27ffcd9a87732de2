#include "qpsim/moments.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace qpsim {

MomentProfile estimate_moments(ArrivalSource& source, std::size_t slots, std::size_t max_lag) {
  if (slots < 10000) throw std::invalid_argument("estimate_moments: need at least 10^4 slots");
  const std::size_t n = source.size();
  const std::size_t cells = n * n;
  MomentProfile out(n, max_lag);

  std::vector<double> sum(cells, 0.0), sum_sq(cells, 0.0), lag_prod(cells * max_lag, 0.0);
  // history[(t mod (max_lag+1)) * cells + v] = a_v(t)
  const std::size_t ring = max_lag + 1;
  std::vector<double> history(cells * ring, 0.0);
  ArrivalMatrix a(n);

  for (std::size_t t = 0; t < slots; ++t) {
    source.next(a);
    double* now = &history[(t % ring) * cells];
    std::fill(now, now + cells, 0.0);
    for (const auto& e : a.nonzero()) now[e.input * n + e.output] = static_cast<double>(a(e.input, e.output));
    for (std::size_t v = 0; v < cells; ++v) {
      const double x = now[v];
      sum[v] += x;
      sum_sq[v] += x * x;
      if (x == 0.0) continue;
      for (std::size_t k = 1; k <= max_lag && k <= t; ++k) lag_prod[v * max_lag + (k - 1)] += x * history[((t - k) % ring) * cells + v];
    }
  }

  const double T = static_cast<double>(slots);
  for (std::size_t v = 0; v < cells; ++v) {
    const double m = sum[v] / T;
    out.mean[v] = m;
    out.variance[v] = std::max(0.0, sum_sq[v] / T - m * m);
    for (std::size_t k = 1; k <= max_lag; ++k)
      out.autocov[v * max_lag + (k - 1)] = lag_prod[v * max_lag + (k - 1)] / (T - static_cast<double>(k)) - m * m;
  }
  return out;
}

MomentProfile bernoulli_moments(const TrafficRateMatrix& lambda, std::size_t max_lag) {
  const std::size_t n = lambda.size();
  MomentProfile out(n, max_lag);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double l = lambda(i, j);
      out.mean[i * n + j] = l;
      out.variance[i * n + j] = l - l * l;
    }
  return out;
}

MomentProfile analytic_moments(const MarkovSpec& spec, std::size_t max_lag) {
  spec.validate();
  const std::size_t n = spec.ports;
  MomentProfile out(n, max_lag);

  struct ChainMoments {
    double mean = 0.0, variance = 0.0;
    std::vector<double> theta;
  };
  std::vector<ChainMoments> per_chain;
  for (const auto& c : spec.chains) {
    const auto s = static_cast<Eigen::Index>(c.states());
    Eigen::MatrixXd p(s, s);
    for (Eigen::Index r = 0; r < s; ++r)
      for (Eigen::Index col = 0; col < s; ++col) p(r, col) = c.transition[r][col];
    const auto pi_vec = c.stationary();
    Eigen::RowVectorXd pi(s);
    Eigen::VectorXd e(s);
    for (Eigen::Index k = 0; k < s; ++k) {
      pi(k) = pi_vec[k];
      e(k) = static_cast<double>(c.emission[k]);
    }
    ChainMoments m;
    m.mean = pi * e;
    m.variance = pi * e.cwiseProduct(e) - m.mean * m.mean;
    Eigen::RowVectorXd weighted = pi.cwiseProduct(e.transpose());  // pi diag(e)
    for (std::size_t k = 1; k <= max_lag; ++k) {
      weighted = weighted * p;
      m.theta.push_back(weighted * e - m.mean * m.mean);
    }
    per_chain.push_back(std::move(m));
  }

  for (std::size_t v = 0; v < n * n; ++v) {
    const int k = spec.assignment[v];
    if (k < 0) continue;
    const auto& m = per_chain[static_cast<std::size_t>(k)];
    out.mean[v] = m.mean;
    out.variance[v] = m.variance;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) out.autocov[v * max_lag + (lag - 1)] = m.theta[lag - 1];
  }
  return out;
}

}  // namespace qpsim
