#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qpsim {

enum class Pattern { uniform, quasi_diagonal, log_diagonal, diagonal };

Pattern parse_pattern(std::string_view name);
std::string to_string(Pattern p);

/// Normalized per-VOQ arrival rates lambda_ij in [0, 1].
class TrafficRateMatrix {
 public:
  TrafficRateMatrix() = default;
  explicit TrafficRateMatrix(std::size_t n) : n_(n), rates_(n * n, 0.0) {}
  static TrafficRateMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return rates_[i * n_ + j]; }
  /// Throws std::invalid_argument unless rate is in [0, 1].
  void set(std::size_t i, std::size_t j, double rate);

  double row_sum(std::size_t i) const;
  double col_sum(std::size_t j) const;
  double total() const;
  /// Lambda-dagger: row_sum(i) + col_sum(j) - lambda_ij.
  double neighborhood(std::size_t i, std::size_t j) const;
  /// Max over every row sum and column sum.
  double load_factor() const;
  /// Every row and column sums to 1 within tol.
  bool is_doubly_stochastic(double tol = 1e-9) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> rates_;
};

/// One of the four normalized benchmark patterns. Requires n >= 2.
TrafficRateMatrix pattern_matrix(Pattern kind, std::size_t n);

/// load * pattern. Requires a doubly stochastic pattern and load in (0, 1].
TrafficRateMatrix rate_matrix(const TrafficRateMatrix& pattern, double offered_load);

double max_load_factor(const TrafficRateMatrix& lambda);

}  // namespace qpsim
