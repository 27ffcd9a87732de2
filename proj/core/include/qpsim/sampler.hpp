#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace qpsim {

using Count = std::uint64_t;
using Rng = std::mt19937_64;

/// Queue-proportional sampler over one input port's VOQ lengths.
///
/// Backed by a binary-indexed tree of cumulative weights: O(log N) update and
/// O(log N) sample. A draw picks an integer ticket u uniformly in [0, total)
/// and returns the index whose cumulative interval contains u, so index j is
/// returned with probability exactly weight(j) / total().
class ProportionalSampler {
 public:
  ProportionalSampler() = default;
  explicit ProportionalSampler(std::size_t n);
  explicit ProportionalSampler(std::span<const Count> weights);

  std::size_t size() const { return weights_.size(); }
  Count total() const { return total_; }
  Count weight(std::size_t index) const { return weights_.at(index); }
  std::span<const Count> weights() const { return weights_; }

  /// Throws std::out_of_range for a bad index.
  void update(std::size_t index, Count new_weight);
  void add(std::size_t index, Count delta);
  void subtract(std::size_t index, Count delta);

  /// Sum of weights [0, k).
  Count prefix(std::size_t k) const;

  /// Index j with prefix(j) <= ticket < prefix(j + 1). Requires ticket < total().
  std::size_t locate(Count ticket) const;

  /// Empty when total() == 0; otherwise a queue-proportional draw.
  std::optional<std::size_t> sample(Rng& rng) const;

 private:
  void tree_add(std::size_t index, Count delta);
  void tree_sub(std::size_t index, Count delta);

  std::vector<Count> weights_;
  std::vector<Count> tree_;  // 1-based Fenwick array
  Count total_ = 0;
  std::size_t top_bit_ = 0;
};

/// O(N) reference sampler with the same ticket-to-index mapping.
class LinearScanSampler {
 public:
  explicit LinearScanSampler(std::span<const Count> weights);

  std::size_t size() const { return weights_.size(); }
  Count total() const { return total_; }
  void update(std::size_t index, Count new_weight);
  std::size_t locate(Count ticket) const;
  std::optional<std::size_t> sample(Rng& rng) const;

 private:
  std::vector<Count> weights_;
  Count total_ = 0;
};

/// Uniform integer ticket in [0, total). Shared by both samplers so that equal
/// seeds give equal tickets.
Count draw_ticket(Rng& rng, Count total);

}  // namespace qpsim
