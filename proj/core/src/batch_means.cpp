#include "qpsim/batch_means.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qpsim {

double student_t_critical(double confidence, std::size_t dof) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  if (dof == 0) return std::numeric_limits<double>::infinity();
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

BatchMeans::BatchMeans(std::uint64_t initial_batch_slots, std::size_t min_batches)
    : min_batches_(min_batches), batch_slots_(initial_batch_slots == 0 ? 1 : initial_batch_slots) {
  if (min_batches < 2) throw std::invalid_argument("BatchMeans: need at least 2 batches");
}

bool BatchMeans::end_slot() {
  if (++slots_in_batch_ < batch_slots_) return false;
  batches_.push_back({cur_num_, cur_den_});
  total_num_ += cur_num_;
  total_den_ += cur_den_;
  cur_num_ = cur_den_ = 0.0;
  slots_in_batch_ = 0;
  if (batches_.size() == 2 * min_batches_) {
    for (std::size_t b = 0; b < min_batches_; ++b) {
      batches_[b].num = batches_[2 * b].num + batches_[2 * b + 1].num;
      batches_[b].den = batches_[2 * b].den + batches_[2 * b + 1].den;
    }
    batches_.resize(min_batches_);
    batch_slots_ *= 2;
  }
  return true;
}

double BatchMeans::mean() const {
  const double num = total_num_ + cur_num_;
  const double den = total_den_ + cur_den_;
  return den > 0.0 ? num / den : 0.0;
}

double BatchMeans::halfwidth(double confidence) const {
  std::vector<double> ratios;
  ratios.reserve(batches_.size());
  for (const auto& b : batches_)
    if (b.den > 0.0) ratios.push_back(b.num / b.den);
  if (ratios.size() < 2) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (double x : ratios) m += x;
  m /= static_cast<double>(ratios.size());
  double ss = 0.0;
  for (double x : ratios) ss += (x - m) * (x - m);
  const double k = static_cast<double>(ratios.size());
  const double sd = std::sqrt(ss / (k - 1.0));
  return student_t_critical(confidence, ratios.size() - 1) * sd / std::sqrt(k);
}

}  // namespace qpsim
