#include "qpsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpsim {

Pattern parse_pattern(std::string_view name) {
  if (name == "uniform") return Pattern::uniform;
  if (name == "quasi-diagonal" || name == "quasi_diagonal") return Pattern::quasi_diagonal;
  if (name == "log-diagonal" || name == "log_diagonal") return Pattern::log_diagonal;
  if (name == "diagonal") return Pattern::diagonal;
  throw std::invalid_argument("unknown traffic pattern '" + std::string(name) + "'");
}

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::uniform:
      return "uniform";
    case Pattern::quasi_diagonal:
      return "quasi-diagonal";
    case Pattern::log_diagonal:
      return "log-diagonal";
    case Pattern::diagonal:
      return "diagonal";
  }
  return "?";
}

TrafficRateMatrix TrafficRateMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  TrafficRateMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("TrafficRateMatrix: rows must form a square grid");
    for (std::size_t j = 0; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

void TrafficRateMatrix::set(std::size_t i, std::size_t j, double rate) {
  if (i >= n_ || j >= n_) throw std::out_of_range("TrafficRateMatrix: index out of range");
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("TrafficRateMatrix: rate must lie in [0, 1]");
  rates_[i * n_ + j] = rate;
}

double TrafficRateMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double TrafficRateMatrix::col_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

double TrafficRateMatrix::total() const {
  double s = 0.0;
  for (double r : rates_) s += r;
  return s;
}

double TrafficRateMatrix::neighborhood(std::size_t i, std::size_t j) const {
  return row_sum(i) + col_sum(j) - (*this)(i, j);
}

double TrafficRateMatrix::load_factor() const {
  double rho = 0.0;
  for (std::size_t k = 0; k < n_; ++k) rho = std::max({rho, row_sum(k), col_sum(k)});
  return rho;
}

bool TrafficRateMatrix::is_doubly_stochastic(double tol) const {
  for (std::size_t k = 0; k < n_; ++k)
    if (std::abs(row_sum(k) - 1.0) > tol || std::abs(col_sum(k) - 1.0) > tol) return false;
  return true;
}

TrafficRateMatrix pattern_matrix(Pattern kind, std::size_t n) {
  if (n < 2) throw std::invalid_argument("pattern_matrix: n must be >= 2");
  TrafficRateMatrix m(n);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind) {
      case Pattern::uniform:
        for (std::size_t j = 0; j < n; ++j) m.set(i, j, 1.0 / nd);
        break;
      case Pattern::quasi_diagonal:
        for (std::size_t j = 0; j < n; ++j) m.set(i, j, i == j ? 0.5 : 1.0 / (2.0 * (nd - 1.0)));
        break;
      case Pattern::log_diagonal: {
        // Diagonal gets 2^(N-1) / (2^N - 1); each next output (cyclically) half the previous.
        // Written as 2^-(k+1) / (1 - 2^-N) to stay finite for large N.
        const double norm = 1.0 - std::ldexp(1.0, -static_cast<int>(n));
        for (std::size_t k = 0; k < n; ++k) m.set(i, (i + k) % n, std::ldexp(1.0, -static_cast<int>(k + 1)) / norm);
        break;
      }
      case Pattern::diagonal:
        m.set(i, i, 2.0 / 3.0);
        m.set(i, (i + 1) % n, 1.0 / 3.0);
        break;
    }
  }
  return m;
}

TrafficRateMatrix rate_matrix(const TrafficRateMatrix& pattern, double offered_load) {
  if (!(offered_load > 0.0 && offered_load <= 1.0)) throw std::invalid_argument("rate_matrix: offered load must lie in (0, 1]");
  if (!pattern.is_doubly_stochastic(1e-9)) throw std::invalid_argument("rate_matrix: pattern is not normalized");
  const std::size_t n = pattern.size();
  TrafficRateMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.set(i, j, std::min(1.0, offered_load * pattern(i, j)));
  return out;
}

double max_load_factor(const TrafficRateMatrix& lambda) { return lambda.load_factor(); }

}  // namespace qpsim
