#include "qpsim/verify.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qpsim/analysis.hpp"
#include "qpsim/simulator.hpp"

namespace qpsim {

namespace {

class NeverMatchScheduler final : public Scheduler {
 public:
  Matching schedule(const QueueMatrix&) override { return {}; }
  std::string name() const override { return "never-match"; }
};

QueueMatrix random_queue(std::size_t n, Rng& rng) {
  QueueMatrix q(n);
  std::bernoulli_distribution nonempty(0.5);
  std::uniform_int_distribution<Count> length(1, 5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (nonempty(rng)) q.set(i, j, length(rng));
  return q;
}

void note_margin(VerifyCheck& c, double lhs, double rhs) {
  if (c.instances == 1 || lhs - rhs < c.worst_lhs - c.worst_rhs) {
    c.worst_lhs = lhs;
    c.worst_rhs = rhs;
  }
}

// Sum over cells of q_ij * D-dagger_ij for one realized schedule.
double weighted_dagger(const QueueMatrix& q, const DepartureMatrix& d) {
  const std::size_t n = q.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (q(i, j) > 0) s += static_cast<double>(q(i, j) * d.neighborhood(i, j));
  return s;
}

}  // namespace

std::unique_ptr<Scheduler> make_never_match_scheduler() { return std::make_unique<NeverMatchScheduler>(); }

bool VerifyReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

VerifyReport run_verification(const VerifyOptions& options) {
  if (options.n_max < 2 || options.n_max > kOracleMaxPorts)
    throw std::invalid_argument("verify: n-max must lie in [2, " + std::to_string(kOracleMaxPorts) + "]");
  VerifyReport report;
  if (options.trials == 0) {
    report.warnings.emplace_back("trials = 0: nothing was checked (vacuous pass)");
    return report;
  }

  Rng rng(options.seed);
  const SchedulerFactory weak_factory = options.weak_under_test ? options.weak_under_test
                                                                : [](std::size_t, std::uint64_t s) -> std::unique_ptr<Scheduler> {
                                                                    return std::make_unique<QpsScheduler>(1, s);
                                                                  };
  const SchedulerFactory strong_factory =
      options.strong_under_test ? options.strong_under_test
                                : [](std::size_t, std::uint64_t s) -> std::unique_ptr<Scheduler> {
                                    return std::make_unique<GreedyMaximalScheduler>(s);
                                  };

  const std::size_t sizes = options.n_max - 1;
  for (std::size_t n = 2; n <= options.n_max; ++n) {
    const std::size_t count = options.trials / sizes + (n == 2 ? options.trials % sizes : 0);
    VerifyCheck weak{"weak_departure_oracle", n};
    VerifyCheck consistency{"oracle_consistency", n};
    for (std::size_t t = 0; t < count; ++t) {
      const auto q = random_queue(n, rng);
      const auto oracle = exact_qps1_expectation(q);
      const double lhs = oracle.weighted_dagger_sum;
      const double rhs = static_cast<double>(q.total());
      ++weak.instances;
      note_margin(weak, lhs, rhs);
      if (lhs < rhs - kOracleTolerance) ++weak.failures;

      ++consistency.instances;
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += oracle.departure(i, j);
        ok = ok && row <= 1.0 + kOracleTolerance;
      }
      for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0, none = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          col += oracle.departure(i, j);
          none *= 1.0 - oracle.proposal(i, j);
        }
        ok = ok && std::abs(col - (1.0 - none)) <= kOracleTolerance;
        for (std::size_t i = 0; i < n; ++i) {
          if (q(i, j) == 0) continue;
          double alone = 1.0;
          for (std::size_t k = 0; k < n; ++k)
            if (k != i) alone *= 1.0 - oracle.proposal(k, j);
          ok = ok && oracle.alpha(i, j) >= alone - kOracleTolerance && oracle.alpha(i, j) <= 1.0 + kOracleTolerance;
        }
      }
      if (!ok) ++consistency.failures;
    }
    report.checks.push_back(weak);
    report.checks.push_back(consistency);
  }

  // Monte Carlo: the scheduler under test against the weak inequality and the QPS-1 oracle.
  constexpr std::size_t kSamples = 4000;
  for (std::size_t n = 2; n <= options.n_max; ++n) {
    VerifyCheck weak_mc{"weak_departure_mc", n};
    VerifyCheck agreement{"oracle_mc_agreement", n};
    const std::size_t count = std::min<std::size_t>(options.trials, 25);
    for (std::size_t t = 0; t < count; ++t) {
      const auto q = random_queue(n, rng);
      auto sched = weak_factory(n, rng());
      const auto oracle = exact_qps1_expectation(q);
      std::vector<double> freq(n * n, 0.0);
      double sum = 0.0, sum_sq = 0.0;
      for (std::size_t s = 0; s < kSamples; ++s) {
        const auto d = departures_from(sched->schedule(q), q);
        const double w = weighted_dagger(q, d);
        sum += w;
        sum_sq += w * w;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) freq[i * n + j] += static_cast<double>(d(i, j));
      }
      const double k = static_cast<double>(kSamples);
      const double mean = sum / k;
      const double se = std::sqrt(std::max(0.0, sum_sq / k - mean * mean) / k);
      const double rhs = static_cast<double>(q.total());
      ++weak_mc.instances;
      note_margin(weak_mc, mean, rhs);
      if (mean < rhs - 5.0 * se - kOracleTolerance) ++weak_mc.failures;

      ++agreement.instances;
      for (std::size_t c = 0; c < n * n; ++c) {
        const double p = oracle.expected_departures[c];
        const double sigma = std::sqrt(p * (1.0 - p) / k);
        if (std::abs(freq[c] / k - p) > 5.0 * sigma + 1e-12) {
          ++agreement.failures;
          break;
        }
      }
    }
    report.checks.push_back(weak_mc);
    report.checks.push_back(agreement);
  }

  // Maximal matchings: strong inequality plus departure-matrix facts.
  {
    VerifyCheck strong{"strong_departure", 0};
    VerifyCheck facts{"departure_facts", 0};
    const std::size_t count = std::max<std::size_t>(1, options.trials / 10);
    std::uniform_int_distribution<std::size_t> size_dist(2, 16);
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t n = size_dist(rng);
      strong.n = std::max(strong.n, n);
      facts.n = strong.n;
      const auto q = random_queue(n, rng);
      auto sched = strong_factory(n, rng());
      const auto m = sched->schedule(q);
      const auto d = departures_from(m, q);
      ++strong.instances;
      note_margin(strong, weighted_dagger(q, d), static_cast<double>(q.total()));
      if (!is_matching(m) || !verify_strong_departure(q, d)) ++strong.failures;

      ++facts.instances;
      bool ok = is_matching(m);
      for (std::size_t k = 0; k < n; ++k) ok = ok && d.row_sum(k) <= 1 && d.col_sum(k) <= 1;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const Count dagger = d.neighborhood(i, j);
          ok = ok && dagger <= 2 && d(i, j) * dagger == d(i, j) && d(i, j) <= q(i, j);
        }
      if (!ok) ++facts.failures;
    }
    report.checks.push_back(strong);
    report.checks.push_back(facts);
  }

  // Sampler goodness of fit, chi-square at the 99% level.
  {
    VerifyCheck chi{"sampler_chi_square", 8};
    constexpr std::size_t kDraws = 100000;
    for (int v = 0; v < 3; ++v) {
      std::vector<Count> w(8);
      std::uniform_int_distribution<Count> wd(0, 9);
      for (auto& x : w) x = wd(rng);
      w[0] += 1;
      const ProportionalSampler sampler(w);
      std::vector<double> hits(w.size(), 0.0);
      for (std::size_t s = 0; s < kDraws; ++s) hits[*sampler.sample(rng)] += 1.0;
      double stat = 0.0;
      std::size_t categories = 0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] == 0) {
          if (hits[j] != 0.0) stat = std::numeric_limits<double>::infinity();
          continue;
        }
        ++categories;
        const double expected = static_cast<double>(kDraws) * static_cast<double>(w[j]) / static_cast<double>(sampler.total());
        stat += (hits[j] - expected) * (hits[j] - expected) / expected;
      }
      ++chi.instances;
      const double critical =
          categories > 1 ? boost::math::quantile(boost::math::chi_squared(static_cast<double>(categories - 1)), 0.99) : 0.0;
      note_margin(chi, critical, stat);
      if (stat > critical) ++chi.failures;
    }
    report.checks.push_back(chi);
  }

  // Little's law on a short converged run.
  {
    VerifyCheck little{"littles_law", 8};
    SimConfig cfg;
    cfg.n = 8;
    cfg.scheduler = SchedulerSpec{SchedulerSpec::Kind::qps, 1};
    cfg.load = 0.3;
    cfg.seed = options.seed;
    const auto result = run(cfg);
    const auto check = littles_law_check(result, result.offered_rate);
    little.instances = 1;
    little.worst_lhs = check.discrepancy;
    little.worst_rhs = 0.02;
    if (check.flagged || check.discrepancy > 0.02) little.failures = 1;
    report.checks.push_back(little);
  }
  return report;
}

void write_verify_csv(std::ostream& out, const VerifyReport& report) {
  out << "check,n,instances,failures,worst_lhs,worst_rhs,pass\n";
  for (const auto& c : report.checks)
    out << c.name << ',' << c.n << ',' << c.instances << ',' << c.failures << ',' << c.worst_lhs << ',' << c.worst_rhs
        << ',' << (c.pass() ? "pass" : "FAIL") << '\n';
}

}  // namespace qpsim
