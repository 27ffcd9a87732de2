#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace qpsim {

/// Dense bitset over port indices [0, n).
class PortSet {
 public:
  PortSet() = default;
  explicit PortSet(std::size_t n, bool filled = false);

  std::size_t size() const { return n_; }

  void set(std::size_t i) { words_[i >> 6] |= bit(i); }
  void reset(std::size_t i) { words_[i >> 6] &= ~bit(i); }
  bool test(std::size_t i) const { return (words_[i >> 6] & bit(i)) != 0; }

  void fill();
  void clear();
  bool any() const;
  std::size_t count() const;

  /// First index i in cyclic order start, start+1, ..., n-1, 0, ..., start-1
  /// that is set in both *this and mask.
  std::optional<std::size_t> first_common_from(const PortSet& mask, std::size_t start) const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int b = std::countr_zero(word);
        fn(w * 64 + static_cast<std::size_t>(b));
        word &= word - 1;
      }
    }
  }

  friend bool operator==(const PortSet&, const PortSet&) = default;

 private:
  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << (i & 63); }
  std::optional<std::size_t> scan(const PortSet& mask, std::size_t from, std::size_t to) const;

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace qpsim
