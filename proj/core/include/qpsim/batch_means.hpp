#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qpsim {

/// Batch-means estimator of a ratio mean (sum of numerators over sum of
/// denominators) accumulated slot by slot.
///
/// Slots are grouped into consecutive batches of equal length. Whenever the
/// number of finished batches reaches 2 * min_batches, adjacent batches are
/// merged and the batch length doubles, so between min_batches and
/// 2 * min_batches batches are always available once enough slots have run.
class BatchMeans {
 public:
  explicit BatchMeans(std::uint64_t initial_batch_slots, std::size_t min_batches = 32);

  void record(double numerator, double denominator) {
    cur_num_ += numerator;
    cur_den_ += denominator;
  }
  /// Closes the current slot. Returns true if that finished a batch.
  bool end_slot();

  std::size_t batches() const { return batches_.size(); }
  std::uint64_t batch_slots() const { return batch_slots_; }
  double numerator() const { return total_num_; }
  double denominator() const { return total_den_; }
  /// Overall ratio; 0 when nothing was recorded.
  double mean() const;
  /// Student-t half-width of the mean at the given two-sided confidence,
  /// from batch ratios. Infinite with fewer than two usable batches.
  double halfwidth(double confidence) const;

 private:
  struct Batch {
    double num = 0.0;
    double den = 0.0;
  };

  std::size_t min_batches_;
  std::uint64_t batch_slots_;
  std::uint64_t slots_in_batch_ = 0;
  double cur_num_ = 0.0, cur_den_ = 0.0;
  double total_num_ = 0.0, total_den_ = 0.0;
  std::vector<Batch> batches_;
};

/// Two-sided Student-t critical value t_{(1+confidence)/2, dof}.
double student_t_critical(double confidence, std::size_t dof);

}  // namespace qpsim
