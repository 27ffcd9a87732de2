#include "qpsim/sampler.hpp"

#include <bit>
#include <stdexcept>

namespace qpsim {

Count draw_ticket(Rng& rng, Count total) {
  return std::uniform_int_distribution<Count>(0, total - 1)(rng);
}

ProportionalSampler::ProportionalSampler(std::size_t n)
    : weights_(n, 0), tree_(n + 1, 0), top_bit_(n == 0 ? 0 : std::bit_floor(n)) {}

ProportionalSampler::ProportionalSampler(std::span<const Count> weights)
    : ProportionalSampler(weights.size()) {
  // Linear-time Fenwick construction.
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights_[i] = weights[i];
    tree_[i + 1] += weights[i];
    const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
    if (parent < tree_.size()) tree_[parent] += tree_[i + 1];
    total_ += weights[i];
  }
}

void ProportionalSampler::tree_add(std::size_t index, Count delta) {
  for (std::size_t k = index + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
}

void ProportionalSampler::tree_sub(std::size_t index, Count delta) {
  for (std::size_t k = index + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] -= delta;
}

void ProportionalSampler::update(std::size_t index, Count new_weight) {
  if (index >= weights_.size()) throw std::out_of_range("ProportionalSampler::update: index out of range");
  const Count old = weights_[index];
  if (new_weight > old) {
    add(index, new_weight - old);
  } else if (new_weight < old) {
    subtract(index, old - new_weight);
  }
}

void ProportionalSampler::add(std::size_t index, Count delta) {
  if (index >= weights_.size()) throw std::out_of_range("ProportionalSampler::add: index out of range");
  weights_[index] += delta;
  total_ += delta;
  tree_add(index, delta);
}

void ProportionalSampler::subtract(std::size_t index, Count delta) {
  if (index >= weights_.size()) throw std::out_of_range("ProportionalSampler::subtract: index out of range");
  if (delta > weights_[index]) throw std::underflow_error("ProportionalSampler::subtract: weight would go negative");
  weights_[index] -= delta;
  total_ -= delta;
  tree_sub(index, delta);
}

Count ProportionalSampler::prefix(std::size_t k) const {
  if (k > weights_.size()) throw std::out_of_range("ProportionalSampler::prefix");
  Count s = 0;
  for (; k > 0; k -= k & (~k + 1)) s += tree_[k];
  return s;
}

std::size_t ProportionalSampler::locate(Count ticket) const {
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next < tree_.size() && tree_[next] <= ticket) {
      pos = next;
      ticket -= tree_[next];
    }
  }
  return pos;  // 1-based pos of the last prefix <= ticket is the 0-based answer
}

std::optional<std::size_t> ProportionalSampler::sample(Rng& rng) const {
  if (total_ == 0) return std::nullopt;
  return locate(draw_ticket(rng, total_));
}

LinearScanSampler::LinearScanSampler(std::span<const Count> weights) : weights_(weights.begin(), weights.end()) {
  for (auto w : weights_) total_ += w;
}

void LinearScanSampler::update(std::size_t index, Count new_weight) {
  if (index >= weights_.size()) throw std::out_of_range("LinearScanSampler::update: index out of range");
  total_ = total_ - weights_[index] + new_weight;
  weights_[index] = new_weight;
}

std::size_t LinearScanSampler::locate(Count ticket) const {
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (ticket < weights_[j]) return j;
    ticket -= weights_[j];
  }
  throw std::out_of_range("LinearScanSampler::locate: ticket beyond total");
}

std::optional<std::size_t> LinearScanSampler::sample(Rng& rng) const {
  if (total_ == 0) return std::nullopt;
  return locate(draw_ticket(rng, total_));
}

}  // namespace qpsim
