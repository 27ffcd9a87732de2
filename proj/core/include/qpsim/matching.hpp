#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "qpsim/matrix.hpp"

namespace qpsim {

struct Edge {
  std::size_t input = 0;
  std::size_t output = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A crossbar schedule: a list of (input, output) pairs. Validity (no port
/// used twice) is a property checked by is_matching, not enforced on insert,
/// so invalid schedules can be represented and rejected.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::vector<Edge> edges) : edges_(std::move(edges)) {}

  void add(Edge e) { edges_.push_back(e); }
  void add(std::size_t input, std::size_t output) { edges_.push_back({input, output}); }
  void clear() { edges_.clear(); }
  void reserve(std::size_t n) { edges_.reserve(n); }

  std::span<const Edge> edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool contains(Edge e) const;

  /// Sum of q over matched pairs.
  Count weight(const QueueMatrix& q) const;

  /// Pairs in ascending (input, output) order; the canonical form for comparison.
  std::vector<Edge> sorted() const;

  friend bool operator==(const Matching& a, const Matching& b) { return a.sorted() == b.sorted(); }

 private:
  std::vector<Edge> edges_;
};

bool is_matching(const Matching& m);

/// True iff no pair (i, j) with q_ij > 0 has both ports unmatched.
bool is_maximal(const Matching& m, const QueueMatrix& q);

/// d_ij = 1 iff (i, j) is in m and q_ij > 0.
DepartureMatrix departures_from(const Matching& m, const QueueMatrix& q);

}  // namespace qpsim
