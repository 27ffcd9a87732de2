#include "qpsim/matrix.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace qpsim {

namespace {

std::size_t square_size(const Rows& rows) {
  const std::size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) throw DimensionError("matrix rows must form a square grid");
  return n;
}

}  // namespace

QueueMatrix::QueueMatrix(std::size_t n)
    : n_(n),
      cells_(n * n, 0),
      rows_(n, ProportionalSampler(n)),
      col_sums_(n, 0),
      row_nonempty_(n, PortSet(n)),
      col_nonempty_(n, PortSet(n)) {}

QueueMatrix QueueMatrix::from_rows(const Rows& rows) {
  QueueMatrix q(square_size(rows));
  for (std::size_t i = 0; i < q.n_; ++i)
    for (std::size_t j = 0; j < q.n_; ++j)
      if (rows[i][j] != 0) q.set(i, j, rows[i][j]);
  return q;
}

void QueueMatrix::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("QueueMatrix: index out of range");
}

Count QueueMatrix::at(std::size_t i, std::size_t j) const {
  check_index(i, j);
  return (*this)(i, j);
}

void QueueMatrix::set(std::size_t i, std::size_t j, Count value) {
  check_index(i, j);
  const Count old = cells_[i * n_ + j];
  if (value > old) {
    increment(i, j, value - old);
  } else if (value < old) {
    decrement(i, j, old - value);
  }
}

void QueueMatrix::increment(std::size_t i, std::size_t j, Count amount) {
  check_index(i, j);
  if (amount == 0) return;
  Count& cell = cells_[i * n_ + j];
  if (total_ > std::numeric_limits<Count>::max() - amount) throw std::overflow_error("QueueMatrix: VOQ length overflow");
  if (cell == 0) {
    row_nonempty_[i].set(j);
    col_nonempty_[j].set(i);
  }
  cell += amount;
  rows_[i].add(j, amount);
  col_sums_[j] += amount;
  total_ += amount;
}

void QueueMatrix::decrement(std::size_t i, std::size_t j, Count amount) {
  check_index(i, j);
  if (amount == 0) return;
  Count& cell = cells_[i * n_ + j];
  if (cell < amount) throw PreconditionError("QueueMatrix: departure from empty VOQ");
  cell -= amount;
  if (cell == 0) {
    row_nonempty_[i].reset(j);
    col_nonempty_[j].reset(i);
  }
  rows_[i].subtract(j, amount);
  col_sums_[j] -= amount;
  total_ -= amount;
}

Count QueueMatrix::neighborhood(std::size_t i, std::size_t j) const {
  check_index(i, j);
  return row_sum(i) + col_sum(j) - (*this)(i, j);
}

Rows QueueMatrix::to_rows() const {
  Rows rows(n_, std::vector<Count>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) rows[i][j] = (*this)(i, j);
  return rows;
}

bool QueueMatrix::caches_consistent() const {
  Count total = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    Count row = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      const Count v = (*this)(i, j);
      row += v;
      if (rows_[i].weight(j) != v) return false;
      if (row_nonempty_[i].test(j) != (v > 0) || col_nonempty_[j].test(i) != (v > 0)) return false;
    }
    if (row != rows_[i].total() || rows_[i].prefix(n_) != row) return false;
    total += row;
  }
  for (std::size_t j = 0; j < n_; ++j) {
    Count col = 0;
    for (std::size_t i = 0; i < n_; ++i) col += (*this)(i, j);
    if (col != col_sums_[j]) return false;
  }
  return total == total_;
}

ArrivalMatrix::ArrivalMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

ArrivalMatrix ArrivalMatrix::from_rows(const Rows& rows) {
  ArrivalMatrix a(square_size(rows));
  for (std::size_t i = 0; i < a.n_; ++i)
    for (std::size_t j = 0; j < a.n_; ++j)
      if (rows[i][j] != 0) a.add(i, j, rows[i][j]);
  return a;
}

void ArrivalMatrix::add(std::size_t i, std::size_t j, Count amount) {
  if (i >= n_ || j >= n_) throw std::out_of_range("ArrivalMatrix: index out of range");
  if (amount == 0) return;
  Count& cell = cells_[i * n_ + j];
  if (cell == 0) touched_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  cell += amount;
  total_ += amount;
}

void ArrivalMatrix::clear() {
  for (const auto& e : touched_) cells_[e.input * n_ + e.output] = 0;
  touched_.clear();
  total_ = 0;
}

Count ArrivalMatrix::max_entry() const {
  Count m = 0;
  for (const auto& e : touched_) m = std::max(m, (*this)(e.input, e.output));
  return m;
}

DepartureMatrix DepartureMatrix::from_rows(const Rows& rows) {
  DepartureMatrix d(square_size(rows));
  for (std::size_t i = 0; i < d.n_; ++i)
    for (std::size_t j = 0; j < d.n_; ++j) {
      if (rows[i][j] > 1) throw std::invalid_argument("DepartureMatrix: entries must be 0 or 1");
      d.set(i, j, rows[i][j] == 1);
    }
  return d;
}

Count DepartureMatrix::row_sum(std::size_t i) const {
  Count s = 0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

Count DepartureMatrix::col_sum(std::size_t j) const {
  Count s = 0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

Count DepartureMatrix::total() const {
  Count s = 0;
  for (auto c : cells_) s += c;
  return s;
}

QueueMatrix apply_slot(const QueueMatrix& q, const DepartureMatrix& d, const ArrivalMatrix& a) {
  const std::size_t n = q.size();
  if (d.size() != n || a.size() != n) throw DimensionError("apply_slot: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (d(i, j) > q(i, j)) throw PreconditionError("apply_slot: departure from empty VOQ");
  QueueMatrix next = q;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (d(i, j) != 0) next.decrement(i, j, d(i, j));
  for (const auto& e : a.nonzero()) next.increment(e.input, e.output, a(e.input, e.output));
  return next;
}

Rows read_matrix_csv(std::istream& in) {
  Rows rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<Count> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      if (first == std::string::npos) throw std::invalid_argument("matrix csv line " + std::to_string(line_no) + ": empty field");
      field = field.substr(first, last - first + 1);
      if (field.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("matrix csv line " + std::to_string(line_no) + ": not a nonnegative integer: " + field);
      row.push_back(std::stoull(field));
    }
    rows.push_back(std::move(row));
  }
  square_size(rows);
  return rows;
}

void write_matrix_csv(std::ostream& out, const Rows& rows) {
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j != 0) out << ',';
      out << row[j];
    }
    out << '\n';
  }
}

}  // namespace qpsim
