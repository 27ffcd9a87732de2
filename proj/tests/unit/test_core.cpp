#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "qpsim/matching.hpp"
#include "qpsim/matrix.hpp"
#include "qpsim/port_set.hpp"

using namespace qpsim;

namespace {

QueueMatrix qm(const Rows& r) { return QueueMatrix::from_rows(r); }

// Independent maximality check: look for any addable nonempty edge.
bool brute_maximal(const Matching& m, const QueueMatrix& q) {
  const std::size_t n = q.size();
  std::vector<bool> in(n, false), out(n, false);
  for (auto e : m.edges()) in[e.input] = out[e.output] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (q(i, j) > 0 && !in[i] && !out[j]) return false;
  return true;
}

}  // namespace

TEST_CASE("port set basics and cyclic search") {
  PortSet s(70);
  CHECK_FALSE(s.any());
  s.set(3);
  s.set(65);
  CHECK(s.count() == 2);
  CHECK(s.test(65));
  PortSet all(70, true);
  CHECK(s.first_common_from(all, 4) == 65);
  CHECK(s.first_common_from(all, 66) == 3);
  std::vector<std::size_t> seen;
  s.for_each([&](std::size_t i) { seen.push_back(i); });
  CHECK(seen == std::vector<std::size_t>{3, 65});
  s.reset(3);
  s.reset(65);
  CHECK_FALSE(s.first_common_from(all, 0).has_value());
}

TEST_CASE("apply_slot examples") {
  auto q = qm({{2}});
  CHECK(apply_slot(q, DepartureMatrix::from_rows({{1}}), ArrivalMatrix::from_rows({{1}})) == qm({{2}}));

  q = qm({{1, 0}, {0, 1}});
  CHECK(apply_slot(q, DepartureMatrix::from_rows({{1, 0}, {0, 1}}), ArrivalMatrix(2)) == QueueMatrix(2));

  q = qm({{3, 1}, {0, 2}});
  const auto next = apply_slot(q, DepartureMatrix::from_rows({{1, 0}, {0, 1}}), ArrivalMatrix::from_rows({{0, 2}, {1, 0}}));
  CHECK(next == qm({{2, 3}, {1, 1}}));
  CHECK(next.total() == q.total() - 2 + 3);
  CHECK(next.caches_consistent());
}

TEST_CASE("apply_slot rejects departures from empty VOQs and mismatched sizes") {
  CHECK_THROWS_AS(apply_slot(qm({{0}}), DepartureMatrix::from_rows({{1}}), ArrivalMatrix(1)), PreconditionError);
  CHECK_THROWS_AS(apply_slot(QueueMatrix(2), DepartureMatrix(3), ArrivalMatrix(2)), DimensionError);
}

TEST_CASE("neighborhood sums") {
  const auto ones = qm({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(ones.neighborhood(i, j) == 5);
      CHECK(neighborhood_sum(ones, i, j) == 5);
    }
  CHECK(qm({{1, 0}, {0, 1}}).neighborhood(1, 1) == 1);
  CHECK(qm({{3, 2}, {2, 0}}).neighborhood(0, 1) == 5);
  CHECK_THROWS_AS(neighborhood_sum(ones, 3, 0), std::out_of_range);
}

TEST_CASE("queue matrix caches stay exact under random updates") {
  std::mt19937_64 rng(7);
  QueueMatrix q(9);
  std::uniform_int_distribution<std::size_t> cell(0, 8);
  for (int step = 0; step < 5000; ++step) {
    const auto i = cell(rng), j = cell(rng);
    if (q(i, j) > 0 && (rng() & 1)) {
      q.decrement(i, j);
    } else {
      q.increment(i, j, 1 + rng() % 3);
    }
  }
  CHECK(q.caches_consistent());
  Count sum = 0;
  for (auto c : q.cells()) sum += c;
  CHECK(q.total() == sum);
  CHECK_THROWS_AS(QueueMatrix(2).decrement(0, 0), PreconditionError);
}

TEST_CASE("queue overflow is a hard error") {
  QueueMatrix q(1);
  q.set(0, 0, std::numeric_limits<Count>::max());
  CHECK_THROWS_AS(q.increment(0, 0), std::overflow_error);
}

TEST_CASE("matrix csv round trip") {
  const Rows rows{{1, 0, 3}, {0, 0, 0}, {7, 2, 1}};
  std::stringstream ss;
  write_matrix_csv(ss, rows);
  CHECK(read_matrix_csv(ss) == rows);
  std::stringstream bad("1,2\n3\n");
  CHECK_THROWS(read_matrix_csv(bad));
}

TEST_CASE("is_matching examples") {
  CHECK(is_matching(Matching({{0, 0}, {1, 1}})));
  CHECK_FALSE(is_matching(Matching({{0, 0}, {0, 1}})));
  CHECK_FALSE(is_matching(Matching({{0, 1}, {1, 1}})));
  CHECK(is_matching(Matching{}));
}

TEST_CASE("is_maximal examples") {
  const auto full = qm({{1, 1}, {1, 1}});
  CHECK_FALSE(is_maximal(Matching({{0, 0}}), full));
  CHECK(is_maximal(Matching({{0, 1}, {1, 0}}), full));
  CHECK(is_maximal(Matching{}, QueueMatrix(2)));
}

TEST_CASE("is_maximal agrees with brute force on random instances") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng() % 6;
    const auto q = testing::random_queue(n, rng, 0.4);
    // random partial matching from a random permutation prefix
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matching m;
    const std::size_t k = rng() % (n + 1);
    for (std::size_t i = 0; i < k; ++i) m.add(i, perm[i]);
    REQUIRE(is_matching(m));
    CHECK(is_maximal(m, q) == brute_maximal(m, q));
  }
}

TEST_CASE("departures_from examples and facts") {
  CHECK(departures_from(Matching({{0, 0}}), qm({{0, 1}, {1, 1}})) == DepartureMatrix(2));
  CHECK(departures_from(Matching({{0, 0}, {1, 1}}), qm({{5, 0}, {0, 7}})) == DepartureMatrix::from_rows({{1, 0}, {0, 1}}));
  CHECK(departures_from(Matching{}, qm({{5, 1}, {2, 7}})) == DepartureMatrix(2));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + rng() % 7;
    const auto q = testing::random_queue(n, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matching m;
    for (std::size_t i = 0; i < n; ++i)
      if (rng() & 1) m.add(i, perm[i]);
    const auto d = departures_from(m, q);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(d.row_sum(i) <= 1);
      CHECK(d.col_sum(i) <= 1);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(d.neighborhood(i, j) <= 2);
        CHECK(d(i, j) * d.neighborhood(i, j) == d(i, j));
      }
    }
  }
}

TEST_CASE("matching weight and canonical equality") {
  const auto q = qm({{3, 2}, {2, 0}});
  const Matching a({{1, 0}, {0, 1}});
  CHECK(a.weight(q) == 4);
  CHECK(a == Matching({{0, 1}, {1, 0}}));
  CHECK(a.contains({1, 0}));
}
