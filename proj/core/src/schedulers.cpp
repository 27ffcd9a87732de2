#include "qpsim/schedulers.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>

namespace qpsim {

namespace {

unsigned parse_positive(std::string_view text, std::string_view what) {
  unsigned value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || value == 0)
    throw std::invalid_argument("scheduler spec: " + std::string(what) + " must be a positive integer, got '" +
                                std::string(text) + "'");
  return value;
}

// "name" or "name:key=value"
std::pair<std::string_view, std::string_view> split_param(std::string_view rest, std::string_view key,
                                                          std::string_view text) {
  const auto eq = rest.find('=');
  if (eq == std::string_view::npos || rest.substr(0, eq) != key)
    throw std::invalid_argument("scheduler spec '" + std::string(text) + "': expected '" + std::string(key) + "=<n>'");
  return {rest.substr(0, eq), rest.substr(eq + 1)};
}

}  // namespace

SchedulerSpec SchedulerSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  SchedulerSpec spec;
  if (name == "qps") {
    spec.kind = Kind::qps;
    spec.iterations = rest.empty() ? 3 : parse_positive(split_param(rest, "r", text).second, "r");
  } else if (name == "islip") {
    spec.kind = Kind::islip;
    spec.iterations = rest.empty() ? 0 : parse_positive(split_param(rest, "iters", text).second, "iters");
  } else if (name == "mwm" || name == "greedy") {
    if (!rest.empty()) throw std::invalid_argument("scheduler spec '" + std::string(text) + "' takes no parameters");
    spec.kind = name == "mwm" ? Kind::mwm : Kind::greedy;
    spec.iterations = 0;
  } else {
    throw std::invalid_argument("unknown scheduler '" + std::string(text) + "'");
  }
  return spec;
}

std::string SchedulerSpec::to_string() const {
  switch (kind) {
    case Kind::qps:
      return "qps:r=" + std::to_string(iterations);
    case Kind::islip:
      return iterations == 0 ? "islip" : "islip:iters=" + std::to_string(iterations);
    case Kind::mwm:
      return "mwm";
    case Kind::greedy:
      return "greedy";
  }
  return "?";
}

unsigned default_islip_iterations(std::size_t n) {
  if (n <= 2) return 1;
  return static_cast<unsigned>(std::bit_width(n - 1));
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSpec& spec, std::size_t n, std::uint64_t seed) {
  switch (spec.kind) {
    case SchedulerSpec::Kind::qps:
      return std::make_unique<QpsScheduler>(spec.iterations, seed);
    case SchedulerSpec::Kind::islip:
      return std::make_unique<IslipScheduler>(n, spec.iterations == 0 ? default_islip_iterations(n) : spec.iterations);
    case SchedulerSpec::Kind::mwm:
      return std::make_unique<MwmScheduler>();
    case SchedulerSpec::Kind::greedy:
      return std::make_unique<GreedyMaximalScheduler>(seed);
  }
  throw std::logic_error("make_scheduler: unhandled kind");
}

// ---------------------------------------------------------------------------

Matching qps_r_schedule(const QueueMatrix& q, unsigned r, Rng& rng) {
  QpsWorkspace ws;
  return qps_r_schedule(q, r, rng, ws);
}

Matching qps_r_schedule(const QueueMatrix& q, unsigned r, Rng& rng, QpsWorkspace& ws) {
  if (r == 0) throw std::invalid_argument("qps_r_schedule: r must be >= 1");
  const std::size_t n = q.size();
  ws.output_match.assign(n, -1);
  ws.input_match.assign(n, -1);
  ws.best_input.assign(n, -1);
  ws.best_value.assign(n, 0);
  ws.ties.assign(n, 0);
  ws.touched.clear();

  Matching m;
  m.reserve(n);
  for (unsigned round = 0; round < r; ++round) {
    bool proposer_left = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (ws.input_match[i] >= 0) continue;
      const auto choice = q.row_sampler(i).sample(rng);
      if (!choice) continue;
      proposer_left = true;
      const std::size_t j = *choice;
      if (ws.output_match[j] >= 0) continue;  // wasted proposal
      const Count value = q(i, j);
      if (ws.best_input[j] < 0) {
        ws.best_input[j] = static_cast<std::int64_t>(i);
        ws.best_value[j] = value;
        ws.ties[j] = 1;
        ws.touched.push_back(j);
      } else if (value > ws.best_value[j]) {
        ws.best_input[j] = static_cast<std::int64_t>(i);
        ws.best_value[j] = value;
        ws.ties[j] = 1;
      } else if (value == ws.best_value[j]) {
        // Reservoir choice keeps each tied proposer with probability 1/ties.
        ++ws.ties[j];
        if (std::uniform_int_distribution<std::uint32_t>(0, ws.ties[j] - 1)(rng) == 0)
          ws.best_input[j] = static_cast<std::int64_t>(i);
      }
    }
    for (const std::size_t j : ws.touched) {
      const auto i = ws.best_input[j];
      ws.output_match[j] = i;
      ws.input_match[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(j);
      m.add(static_cast<std::size_t>(i), j);
      ws.best_input[j] = -1;
    }
    ws.touched.clear();
    if (!proposer_left) break;
  }
  return m;
}

QpsScheduler::QpsScheduler(unsigned r, std::uint64_t seed) : r_(r), rng_(seed) {
  if (r == 0) throw std::invalid_argument("QpsScheduler: r must be >= 1");
}

Matching QpsScheduler::schedule(const QueueMatrix& q) { return qps_r_schedule(q, r_, rng_, ws_); }

std::string QpsScheduler::name() const { return "qps:r=" + std::to_string(r_); }

// ---------------------------------------------------------------------------

Matching islip_schedule(const QueueMatrix& q, unsigned iterations, IslipPointers& state) {
  if (iterations == 0) throw std::invalid_argument("islip_schedule: iterations must be >= 1");
  const std::size_t n = q.size();
  if (state.grant.size() != n || state.accept.size() != n)
    throw DimensionError("islip_schedule: pointer state does not match switch size");

  PortSet free_inputs(n, true);
  PortSet free_outputs(n, true);
  std::vector<PortSet> grants(n, PortSet(n));
  Matching m;

  for (unsigned it = 0; it < iterations; ++it) {
    for (auto& g : grants) g.clear();
    bool granted = false;
    // Grant: each free output picks the first requesting free input at or after its pointer.
    free_outputs.for_each([&](std::size_t j) {
      if (auto i = q.nonempty_inputs(j).first_common_from(free_inputs, state.grant[j])) {
        grants[*i].set(j);
        granted = true;
      }
    });
    if (!granted) break;
    // Accept: each input picks the first granting output at or after its pointer.
    std::vector<Edge> accepted;
    free_inputs.for_each([&](std::size_t i) {
      if (!grants[i].any()) return;
      const auto j = grants[i].first_common_from(free_outputs, state.accept[i]);
      accepted.push_back({i, *j});
    });
    for (const auto& e : accepted) {
      m.add(e);
      free_inputs.reset(e.input);
      free_outputs.reset(e.output);
      if (it == 0) {
        state.accept[e.input] = (e.output + 1) % n;
        state.grant[e.output] = (e.input + 1) % n;
      }
    }
  }
  return m;
}

IslipScheduler::IslipScheduler(std::size_t n, unsigned iterations) : iterations_(iterations), pointers_(n) {
  if (iterations == 0) throw std::invalid_argument("IslipScheduler: iterations must be >= 1");
}

Matching IslipScheduler::schedule(const QueueMatrix& q) { return islip_schedule(q, iterations_, pointers_); }

std::string IslipScheduler::name() const { return "islip:iters=" + std::to_string(iterations_); }

// ---------------------------------------------------------------------------

Matching greedy_maximal_schedule(const QueueMatrix& q, Rng& rng) {
  const std::size_t n = q.size();
  std::vector<Edge> candidates;
  for (std::size_t i = 0; i < n; ++i) q.nonempty_outputs(i).for_each([&](std::size_t j) { candidates.push_back({i, j}); });
  std::shuffle(candidates.begin(), candidates.end(), rng);

  PortSet free_inputs(n, true);
  PortSet free_outputs(n, true);
  Matching m;
  for (const auto& e : candidates) {
    if (free_inputs.test(e.input) && free_outputs.test(e.output)) {
      m.add(e);
      free_inputs.reset(e.input);
      free_outputs.reset(e.output);
    }
  }
  return m;
}

}  // namespace qpsim
