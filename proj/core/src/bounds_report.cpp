#include "qpsim/bounds_report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "qpsim/analysis.hpp"

namespace qpsim {

BoundsReport evaluate_bounds(const BoundsRequest& req) {
  BoundsReport rep;
  const std::size_t max_lag = req.k.value_or(0);

  switch (req.source.kind) {
    case SourceSpec::Kind::bernoulli:
      rep.lambda = rate_matrix(pattern_matrix(req.pattern, req.n), req.load);
      rep.moments = bernoulli_moments(rep.lambda, max_lag);
      break;
    case SourceSpec::Kind::onoff: {
      rep.lambda = rate_matrix(pattern_matrix(req.pattern, req.n), req.load);
      rep.iid = false;
      OnOffSource src(rep.lambda, req.source.burst, req.seed, req.source.off_mean);
      rep.moments = estimate_moments(src, req.estimate_slots, max_lag);
      break;
    }
    case SourceSpec::Kind::markov: {
      const auto spec = MarkovSpec::load(req.source.chain_file);
      const MarkovSource src(spec, req.seed);
      rep.lambda = src.rates();
      rep.moments = analytic_moments(spec, max_lag);
      // A chain with one state per VOQ is i.i.d. in time.
      rep.iid = std::all_of(spec.chains.begin(), spec.chains.end(), [](const MarkovChain& c) { return c.states() == 1; });
      break;
    }
  }
  rep.rho = rep.lambda.load_factor();
  rep.total_rate = rep.lambda.total();

  if (!rep.iid) {
    rep.iid_queue.reason = "n/a (arrivals not i.i.d.)";
  } else if (rep.rho >= 0.5) {
    rep.iid_queue.reason = "undefined (rho >= 1/2)";
  } else {
    rep.iid_queue.value = iid_queue_bound(rep.lambda, rep.moments.variance);
  }

  if (req.source.kind != SourceSpec::Kind::bernoulli) {
    rep.clean_delay.reason = "n/a (Bernoulli arrivals only)";
  } else if (rep.rho >= 0.5) {
    rep.clean_delay.reason = "undefined (rho >= 1/2)";
  } else {
    rep.clean_delay.value = bernoulli_delay_bound(rep.rho);
  }

  if (!req.xi || !req.k) {
    rep.markov_queue.reason = "n/a (needs --xi and --k)";
  } else if (*req.xi >= 1.0) {
    rep.markov_queue.reason = "undefined (xi >= 1)";
  } else if (*req.k < 1) {
    rep.markov_queue.reason = "undefined (k < 1)";
  } else {
    rep.markov_queue.value = markovian_queue_bound(MarkovBoundInputs{rep.lambda, rep.moments, *req.xi, *req.k});
  }
  return rep;
}

void print_bounds(std::ostream& out, const BoundsReport& rep) {
  const std::size_t n = rep.lambda.size();
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      lo = std::min(lo, rep.lambda(i, j));
      hi = std::max(hi, rep.lambda(i, j));
    }
  out << fmt::format("ports            {}\n", n);
  out << fmt::format("lambda total     {:.6g}\n", rep.total_rate);
  out << fmt::format("lambda min/max   {:.6g} / {:.6g}\n", lo, hi);
  out << fmt::format("rho              {:.6g}\n", rep.rho);
  out << "lambda-dagger:\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << ' ';
    for (std::size_t j = 0; j < n; ++j) out << fmt::format(" {:8.5f}", rep.lambda.neighborhood(i, j));
    out << '\n';
  }
  auto line = [&](const char* label, const BoundValue& b) {
    if (b.value) {
      out << fmt::format("{:<28} {:.6g}\n", label, *b.value);
    } else {
      out << fmt::format("{:<28} {}\n", label, b.reason);
    }
  };
  line("iid queue-length bound", rep.iid_queue);
  line("bernoulli delay bound", rep.clean_delay);
  line("markovian queue-length bound", rep.markov_queue);
}

}  // namespace qpsim
