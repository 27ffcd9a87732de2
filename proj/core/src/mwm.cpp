#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "qpsim/schedulers.hpp"

namespace qpsim {

// Shortest-augmenting-path assignment (Hungarian method with potentials),
// O(N^3). Minimizes sum of -q_ij over full permutations of the dense grid;
// zero-weight pairs in the optimal permutation are dropped afterwards.
Matching mwm_schedule(const QueueMatrix& q) {
  const std::size_t n = q.size();
  if (n == 0) return {};
  using Cost = std::int64_t;
  constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

  auto cost = [&](std::size_t i, std::size_t j) { return -static_cast<Cost>(q(i - 1, j - 1)); };

  std::vector<Cost> u(n + 1, 0), v(n + 1, 0), min_to(n + 1);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::fill(min_to.begin(), min_to.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      Cost delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Cost reduced = cost(i0, j) - u[i0] - v[j];
        if (reduced < min_to[j]) {
          min_to[j] = reduced;
          way[j] = j0;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Matching m;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = row_of[j];
    if (i != 0 && q(i - 1, j - 1) > 0) m.add(i - 1, j - 1);
  }
  return m;
}

}  // namespace qpsim
