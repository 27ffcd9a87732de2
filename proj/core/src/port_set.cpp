#include "qpsim/port_set.hpp"

#include <bit>

namespace qpsim {

PortSet::PortSet(std::size_t n, bool filled) : n_(n), words_((n + 63) / 64, 0) {
  if (filled) fill();
}

void PortSet::fill() {
  for (auto& w : words_) w = ~std::uint64_t{0};
  if (n_ % 64 != 0 && !words_.empty()) words_.back() = (std::uint64_t{1} << (n_ % 64)) - 1;
}

void PortSet::clear() {
  for (auto& w : words_) w = 0;
}

bool PortSet::any() const {
  for (auto w : words_)
    if (w != 0) return true;
  return false;
}

std::size_t PortSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

// Scans [from, to) for the first index set in both sets.
std::optional<std::size_t> PortSet::scan(const PortSet& mask, std::size_t from, std::size_t to) const {
  if (from >= to) return std::nullopt;
  std::size_t w = from >> 6;
  const std::size_t last = (to - 1) >> 6;
  std::uint64_t word = (words_[w] & mask.words_[w]) & (~std::uint64_t{0} << (from & 63));
  while (true) {
    if (w == last && (to & 63) != 0) word &= (std::uint64_t{1} << (to & 63)) - 1;
    if (word != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(word));
    if (w == last) return std::nullopt;
    ++w;
    word = words_[w] & mask.words_[w];
  }
}

std::optional<std::size_t> PortSet::first_common_from(const PortSet& mask, std::size_t start) const {
  if (n_ == 0) return std::nullopt;
  if (auto hit = scan(mask, start, n_)) return hit;
  return scan(mask, 0, start);
}

}  // namespace qpsim
