#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "qpsim/port_set.hpp"
#include "qpsim/sampler.hpp"

namespace qpsim {

/// Raised when an operation's documented precondition does not hold
/// (e.g. a departure from an empty VOQ).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for mismatched matrix dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rows = std::vector<std::vector<Count>>;

/// VOQ lengths Q(t) of an N x N input-queued switch.
///
/// Row sums, column sums and the total are cached and kept exact. Each row
/// also carries a ProportionalSampler and the set of nonempty outputs, and each
/// column the set of nonempty inputs, so schedulers can query them in
/// sublinear time.
class QueueMatrix {
 public:
  QueueMatrix() = default;
  explicit QueueMatrix(std::size_t n);
  static QueueMatrix from_rows(const Rows& rows);

  std::size_t size() const { return n_; }
  Count operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  Count at(std::size_t i, std::size_t j) const;

  void set(std::size_t i, std::size_t j, Count value);
  void increment(std::size_t i, std::size_t j, Count amount = 1);
  /// Throws PreconditionError if q_ij < amount.
  void decrement(std::size_t i, std::size_t j, Count amount = 1);

  Count row_sum(std::size_t i) const { return rows_[i].total(); }
  Count col_sum(std::size_t j) const { return col_sums_[j]; }
  Count total() const { return total_; }
  /// Q-dagger: sum over VOQs sharing input i or output j, counting q_ij once.
  Count neighborhood(std::size_t i, std::size_t j) const;

  const ProportionalSampler& row_sampler(std::size_t i) const { return rows_[i]; }
  const PortSet& nonempty_outputs(std::size_t i) const { return row_nonempty_[i]; }
  const PortSet& nonempty_inputs(std::size_t j) const { return col_nonempty_[j]; }

  std::span<const Count> cells() const { return cells_; }
  Rows to_rows() const;

  /// Recomputes every cached aggregate from cells and compares.
  bool caches_consistent() const;

  friend bool operator==(const QueueMatrix& a, const QueueMatrix& b) { return a.n_ == b.n_ && a.cells_ == b.cells_; }

 private:
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<Count> cells_;
  std::vector<ProportionalSampler> rows_;
  std::vector<Count> col_sums_;
  std::vector<PortSet> row_nonempty_;
  std::vector<PortSet> col_nonempty_;
  Count total_ = 0;
};

/// Arrivals A(t) for one slot. Dense storage plus a list of touched cells, so
/// clearing and iterating cost O(number of arrivals).
class ArrivalMatrix {
 public:
  struct Entry {
    std::uint32_t input;
    std::uint32_t output;
  };

  ArrivalMatrix() = default;
  explicit ArrivalMatrix(std::size_t n);
  static ArrivalMatrix from_rows(const Rows& rows);

  std::size_t size() const { return n_; }
  Count operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  void add(std::size_t i, std::size_t j, Count amount = 1);
  void clear();

  /// Cells with a nonzero count, each listed once, in first-touch order.
  std::span<const Entry> nonzero() const { return touched_; }
  Count total() const { return total_; }
  Count max_entry() const;

 private:
  std::size_t n_ = 0;
  std::vector<Count> cells_;
  std::vector<Entry> touched_;
  Count total_ = 0;
};

/// Departures D(t): a 0/1 grid with at most one 1 per row and per column.
class DepartureMatrix {
 public:
  DepartureMatrix() = default;
  explicit DepartureMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}
  static DepartureMatrix from_rows(const Rows& rows);

  std::size_t size() const { return n_; }
  Count operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, bool departs) { cells_[i * n_ + j] = departs ? 1 : 0; }

  Count row_sum(std::size_t i) const;
  Count col_sum(std::size_t j) const;
  Count total() const;
  /// D-dagger for cell (i, j).
  Count neighborhood(std::size_t i, std::size_t j) const { return row_sum(i) + col_sum(j) - (*this)(i, j); }

  friend bool operator==(const DepartureMatrix&, const DepartureMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// row_sum(i) - m_ij + col_sum(j) for any square grid exposing size() and (i, j).
template <typename Grid>
auto neighborhood_sum(const Grid& m, std::size_t i, std::size_t j) {
  const std::size_t n = m.size();
  if (i >= n || j >= n) throw std::out_of_range("neighborhood_sum: index out of range");
  decltype(m(i, j)) s{};
  for (std::size_t k = 0; k < n; ++k) s += m(i, k);
  for (std::size_t k = 0; k < n; ++k) s += m(k, j);
  return s - m(i, j);
}

/// One slot of the queueing law: q_ij - d_ij + a_ij.
QueueMatrix apply_slot(const QueueMatrix& q, const DepartureMatrix& d, const ArrivalMatrix& a);

/// Row-major CSV: one row per line, comma-separated nonnegative integers.
Rows read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Rows& rows);

}  // namespace qpsim
