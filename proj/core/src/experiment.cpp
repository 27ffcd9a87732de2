#include "qpsim/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace qpsim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class FieldParser {
 public:
  FieldParser(std::size_t line, std::string key) : line_(line), key_(std::move(key)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ", field '" + key_ + "': " + what);
  }

  double number(std::string_view text) const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end) fail("not a number: '" + std::string(text) + "'");
    return v;
  }

  std::uint64_t integer(std::string_view text) const {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end) fail("not a nonnegative integer: '" + std::string(text) + "'");
    return v;
  }

  bool boolean(std::string_view text) const {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail("expected true/false, got '" + std::string(text) + "'");
  }

  /// Comma list whose items may be start:step:stop ranges (inclusive).
  std::vector<double> numbers(std::string_view value) const {
    std::vector<double> out;
    for (const auto& item : split_list(value)) {
      if (item.empty()) fail("empty list item");
      const auto c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(number(item));
        continue;
      }
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string::npos) fail("range must be start:step:stop");
      const double start = number(item.substr(0, c1));
      const double step = number(item.substr(c1 + 1, c2 - c1 - 1));
      const double stop = number(item.substr(c2 + 1));
      if (!(step > 0.0) || stop < start) fail("range needs step > 0 and stop >= start");
      const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
    }
    return out;
  }

  std::vector<std::uint64_t> integers(std::string_view value) const {
    std::vector<std::uint64_t> out;
    for (double v : numbers(value)) {
      if (v < 0.0 || std::floor(v) != v) fail("expected nonnegative integers");
      out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
  }

 private:
  std::size_t line_;
  std::string key_;
};

void set_run_field(RunTemplate& run, const std::string& key, const std::string& value, const FieldParser& p) {
  try {
    if (key == "scheduler") {
      run.schedulers.clear();
      for (const auto& s : split_list(value)) run.schedulers.push_back(SchedulerSpec::parse(s));
    } else if (key == "pattern") {
      run.patterns.clear();
      for (const auto& s : split_list(value)) run.patterns.push_back(parse_pattern(s));
    } else if (key == "n") {
      run.ports.clear();
      for (auto v : p.integers(value)) run.ports.push_back(static_cast<std::size_t>(v));
    } else if (key == "load") {
      run.loads = p.numbers(value);
    } else if (key == "burst") {
      run.bursts = p.numbers(value);
    } else if (key == "source") {
      run.source = SourceSpec::parse(value);
    } else if (key == "seed" || key == "seeds") {
      run.seeds = p.integers(value);
    } else if (key == "min_slots_factor") {
      run.stopping.min_slots_factor = p.number(value);
    } else if (key == "precision") {
      run.stopping.relative_precision = p.number(value);
    } else if (key == "confidence") {
      run.stopping.confidence = p.number(value);
    } else if (key == "max_slots") {
      run.stopping.max_slots = p.integer(value);
    } else if (key == "discard_warmup") {
      run.stopping.discard_warmup = p.boolean(value);
    } else if (key == "check_property") {
      run.check_departure_property = p.boolean(value);
    } else if (key == "lo") {
      run.lo = p.number(value);
    } else if (key == "hi") {
      run.hi = p.number(value);
    } else if (key == "tolerance") {
      run.tolerance = p.number(value);
    } else {
      p.fail("unknown key");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    p.fail(e.what());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  enum class Section { none, experiment, run } section = Section::none;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[experiment]") {
        section = Section::experiment;
      } else if (line == "[run]") {
        section = Section::run;
        config.runs.emplace_back();
        config.runs.back().line = line_no;
      } else {
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown section " + line);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const FieldParser p(line_no, key);
    if (value.empty()) p.fail("missing value");

    switch (section) {
      case Section::none:
        p.fail("key outside of a section");
      case Section::experiment:
        if (key == "seed" || key == "seeds") {
          config.seeds = p.integers(value);
        } else if (key == "out") {
          config.out = value;
        } else {
          p.fail("unknown key");
        }
        break;
      case Section::run:
        set_run_field(config.runs.back(), key, value, p);
        break;
    }
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse(in);
}

std::vector<ExpandedPoint> expand(const ExperimentConfig& config, std::uint64_t seed_base) {
  std::vector<ExpandedPoint> points;
  for (const auto& run : config.runs) {
    const auto& seeds = run.seeds.empty() ? config.seeds : run.seeds;
    std::vector<std::optional<double>> bursts;
    if (run.bursts.empty()) {
      bursts.push_back(std::nullopt);
    } else {
      for (double b : run.bursts) bursts.push_back(b);
    }
    for (const auto& sched : run.schedulers)
      for (const auto pattern : run.patterns)
        for (const auto n : run.ports)
          for (const double load : run.loads)
            for (const auto& burst : bursts)
              for (const auto seed : seeds) {
                ExpandedPoint pt;
                pt.index = points.size();
                auto& c = pt.config;
                c.n = n;
                c.scheduler = sched;
                c.pattern = pattern;
                c.load = load;
                c.seed = seed + seed_base;
                c.stopping = run.stopping;
                c.check_departure_property = run.check_departure_property;
                c.source = run.source;
                if (burst) {
                  if (*burst < 1.0)
                    throw ConfigError("config section at line " + std::to_string(run.line) + ": burst must be >= 1");
                  c.source.kind = SourceSpec::Kind::onoff;
                  c.source.burst = *burst;
                }
                pt.burst = c.source.kind == SourceSpec::Kind::onoff ? c.source.burst : 0.0;
                try {
                  c.validate();
                } catch (const std::invalid_argument& e) {
                  throw ConfigError("config section at line " + std::to_string(run.line) + ": " + e.what());
                }
                points.push_back(std::move(pt));
              }
  }
  return points;
}

namespace {

template <typename Job>
void parallel_for(std::size_t count, unsigned jobs, Job&& job) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        job(k);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<SimResult> run_points(const std::vector<ExpandedPoint>& points, unsigned jobs) {
  std::vector<SimResult> results(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t k) { results[k] = run(points[k].config); });
  return results;
}

ResultRow make_row(const ExpandedPoint& point, const SimResult& result) {
  const auto& c = point.config;
  return ResultRow{c.scheduler.to_string(),  to_string(c.pattern), c.n,           c.load,
                   point.burst,              c.seed,               result.slots_run, result.mean_delay,
                   result.delay_ci_halfwidth, result.mean_total_queue, result.converged};
}

void apply_sweep(ExperimentConfig& config, SweepAxis axis) {
  for (auto& run : config.runs) {
    switch (axis) {
      case SweepAxis::none:
        break;
      case SweepAxis::burst:
        run.bursts.clear();
        for (double b = 16; b <= 1024; b *= 2) run.bursts.push_back(b);
        break;
      case SweepAxis::ports:
        run.ports.clear();
        for (std::size_t n = 8; n <= 512; n *= 2) run.ports.push_back(n);
        break;
      case SweepAxis::iterations:
        run.schedulers.clear();
        for (unsigned r = 1; r <= 4; ++r) run.schedulers.push_back(SchedulerSpec{SchedulerSpec::Kind::qps, r});
        break;
    }
  }
}

RunSummary run_experiment(const ExperimentConfig& config, unsigned jobs, std::uint64_t seed_base) {
  const auto points = expand(config, seed_base);
  const auto results = run_points(points, jobs);
  RunSummary summary;
  for (std::size_t k = 0; k < points.size(); ++k) {
    summary.rows.push_back(make_row(points[k], results[k]));
    if (!results[k].converged) ++summary.non_converged;
  }
  return summary;
}

std::vector<KneeRow> run_throughput(const ExperimentConfig& config, unsigned jobs, std::uint64_t seed_base) {
  // Collapse the load axis: one search per remaining combination.
  ExperimentConfig collapsed = config;
  for (auto& run : collapsed.runs) {
    if (!(run.lo > 0.0 && run.hi < 1.0 && run.lo < run.hi))
      throw std::invalid_argument("throughput: need 0 < lo < hi < 1 (section at line " + std::to_string(run.line) + ")");
    if (!(run.tolerance > 0.0)) throw std::invalid_argument("throughput: tolerance must be positive");
    run.loads = {0.5 * (run.lo + run.hi)};
  }
  const auto points = expand(collapsed, seed_base);

  // Map each point back to its template for the bracket.
  std::vector<const RunTemplate*> owner;
  for (const auto& run : collapsed.runs) {
    const auto& seeds = run.seeds.empty() ? collapsed.seeds : run.seeds;
    const std::size_t count = run.schedulers.size() * run.patterns.size() * run.ports.size() *
                              std::max<std::size_t>(1, run.bursts.size()) * seeds.size();
    owner.insert(owner.end(), count, &run);
  }

  std::vector<KneeRow> rows(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t k) {
    const auto& pt = points[k];
    const auto& run = *owner[k];
    const auto r = throughput_search(pt.config, run.lo, run.hi, run.tolerance);
    rows[k] = KneeRow{pt.config.scheduler.to_string(), to_string(pt.config.pattern), pt.config.n, pt.burst,
                      pt.config.seed, run.lo, run.hi, run.tolerance, r.knee, r.probes.size(), r.flagged};
  });
  return rows;
}

}  // namespace qpsim
