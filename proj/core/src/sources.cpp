#include "qpsim/sources.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qpsim {

BernoulliSource::BernoulliSource(TrafficRateMatrix rates, std::uint64_t seed) : rates_(std::move(rates)), rng_(seed) {
  const std::size_t n = rates_.size();
  std::map<double, std::vector<std::uint32_t>> by_rate;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = rates_(i, j);
      if (r > 1.0) throw std::invalid_argument("BernoulliSource: rate exceeds 1");
      if (r > 0.0) by_rate[r].push_back(static_cast<std::uint32_t>(i * n + j));
    }
  for (auto& [rate, cells] : by_rate) {
    const double p = rate < 1.0 ? rate : 0.5;  // distribution unused when rate == 1
    groups_.push_back(Group{rate, std::move(cells), std::geometric_distribution<std::uint64_t>(p)});
  }
}

void BernoulliSource::next(ArrivalMatrix& out) {
  out.clear();
  const std::size_t n = rates_.size();
  for (auto& g : groups_) {
    const std::uint64_t m = g.cells.size();
    if (g.rate >= 1.0) {
      for (auto c : g.cells) out.add(c / n, c % n);
      continue;
    }
    // Each draw is the number of failures before the next success.
    std::uint64_t pos = g.skip(rng_);
    while (pos < m) {
      const auto c = g.cells[pos];
      out.add(c / n, c % n);
      pos += 1 + g.skip(rng_);
    }
  }
}

// ---------------------------------------------------------------------------

OnOffSource::OnOffSource(TrafficRateMatrix rates, double mean_burst, std::uint64_t seed, std::optional<double> off_mean)
    : rates_(std::move(rates)), mean_burst_(mean_burst), rng_(seed) {
  if (!(mean_burst >= 1.0)) throw std::invalid_argument("OnOffSource: mean burst must be >= 1");
  const double off = off_mean.value_or(mean_burst);
  if (!(off > 0.0)) throw std::invalid_argument("OnOffSource: mean OFF duration must be positive");
  p_on_ = 1.0 / (mean_burst + 1.0);
  p_off_ = 1.0 / (off + 1.0);

  const std::size_t n = rates_.size();
  row_load_.resize(n);
  destination_.resize(n);
  ports_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_load_[i] = rates_.row_sum(i);
    if (row_load_[i] > 1.0 + 1e-12) throw std::invalid_argument("OnOffSource: row load exceeds 1");
    row_load_[i] = std::min(1.0, row_load_[i]);
    if (row_load_[i] > 0.0) {
      std::vector<double> w(n);
      for (std::size_t j = 0; j < n; ++j) w[j] = rates_(i, j);
      destination_[i] = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }
  }
  // Start each port in a phase drawn with the long-run ON fraction.
  const double on_fraction = mean_burst / (mean_burst + off);
  for (std::size_t i = 0; i < n; ++i) begin_phase(i, std::bernoulli_distribution(on_fraction)(rng_));
}

std::string OnOffSource::name() const {
  std::string s = "onoff:burst=";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, mean_burst_);
  (void)ec;
  return s.append(buf, end);
}

void OnOffSource::begin_phase(std::size_t i, bool on) {
  auto& st = ports_[i];
  st.on = on;
  st.remaining = std::geometric_distribution<std::uint64_t>(on ? p_on_ : p_off_)(rng_);
  if (on && row_load_[i] > 0.0) st.destination = destination_[i](rng_);
}

void OnOffSource::next(ArrivalMatrix& out) {
  out.clear();
  const std::size_t n = rates_.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& st = ports_[i];
    while (st.remaining == 0) begin_phase(i, !st.on);
    --st.remaining;
    if (row_load_[i] <= 0.0) continue;
    if (std::bernoulli_distribution(row_load_[i])(rng_)) {
      const std::size_t j = st.on ? st.destination : destination_[i](rng_);
      out.add(i, j);
    }
  }
}

// ---------------------------------------------------------------------------

MarkovSource::MarkovSource(MarkovSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rates_(spec_.ports), rng_(seed) {
  spec_.validate();
  const std::size_t n = spec_.ports;
  std::vector<std::vector<double>> stationary;
  for (const auto& c : spec_.chains) {
    std::vector<std::discrete_distribution<std::size_t>> rows;
    for (const auto& row : c.transition) rows.emplace_back(row.begin(), row.end());
    step_.push_back(std::move(rows));
    stationary.push_back(c.stationary());
  }
  state_.assign(n * n, 0);
  for (std::size_t v = 0; v < n * n; ++v) {
    const int k = spec_.assignment[v];
    if (k < 0) continue;
    const auto& chain = spec_.chains[static_cast<std::size_t>(k)];
    const auto& pi = stationary[static_cast<std::size_t>(k)];
    state_[v] = std::discrete_distribution<std::size_t>(pi.begin(), pi.end())(rng_);
    double rate = 0.0;
    for (std::size_t s = 0; s < chain.states(); ++s) rate += pi[s] * static_cast<double>(chain.emission[s]);
    if (rate > 1.0 + 1e-12) throw std::invalid_argument("MarkovSource: long-run rate of a VOQ exceeds 1");
    rates_.set(v / n, v % n, std::min(1.0, rate));
  }
}

void MarkovSource::next(ArrivalMatrix& out) {
  out.clear();
  const std::size_t n = spec_.ports;
  for (std::size_t v = 0; v < n * n; ++v) {
    const int k = spec_.assignment[v];
    if (k < 0) continue;
    const auto ck = static_cast<std::size_t>(k);
    state_[v] = step_[ck][state_[v]](rng_);
    const Count e = spec_.chains[ck].emission[state_[v]];
    if (e > 0) out.add(v / n, v % n, e);
  }
}

// ---------------------------------------------------------------------------

namespace {

double parse_number(std::string_view text, std::string_view what, std::string_view whole) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("source spec '" + std::string(whole) + "': bad " + std::string(what) + " value");
  return v;
}

}  // namespace

SourceSpec SourceSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  SourceSpec spec;
  if (name == "bernoulli") {
    if (!rest.empty()) throw std::invalid_argument("source spec 'bernoulli' takes no parameters");
    return spec;
  }
  if (name == "markov") {
    spec.kind = Kind::markov;
    if (rest.substr(0, 5) != "file=" || rest.size() == 5)
      throw std::invalid_argument("source spec '" + std::string(text) + "': expected markov:file=<path>");
    spec.chain_file = std::string(rest.substr(5));
    return spec;
  }
  if (name != "onoff") throw std::invalid_argument("unknown source '" + std::string(text) + "'");

  spec.kind = Kind::onoff;
  bool have_burst = false;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view kv = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("source spec '" + std::string(text) + "': expected key=value");
    const auto key = kv.substr(0, eq);
    const auto val = kv.substr(eq + 1);
    if (key == "burst") {
      spec.burst = parse_number(val, "burst", text);
      have_burst = true;
    } else if (key == "off") {
      spec.off_mean = parse_number(val, "off", text);
    } else {
      throw std::invalid_argument("source spec '" + std::string(text) + "': unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_burst || spec.burst < 1.0)
    throw std::invalid_argument("source spec '" + std::string(text) + "': onoff needs burst >= 1");
  return spec;
}

std::string SourceSpec::to_string() const {
  auto num = [](double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
  };
  switch (kind) {
    case Kind::bernoulli:
      return "bernoulli";
    case Kind::onoff:
      return "onoff:burst=" + num(burst) + (off_mean ? ",off=" + num(*off_mean) : "");
    case Kind::markov:
      return "markov:file=" + chain_file;
  }
  return "?";
}

std::unique_ptr<ArrivalSource> make_source(const SourceSpec& spec, const TrafficRateMatrix& lambda, std::uint64_t seed) {
  switch (spec.kind) {
    case SourceSpec::Kind::bernoulli:
      return std::make_unique<BernoulliSource>(lambda, seed);
    case SourceSpec::Kind::onoff:
      return std::make_unique<OnOffSource>(lambda, spec.burst, seed, spec.off_mean);
    case SourceSpec::Kind::markov: {
      auto chains = MarkovSpec::load(spec.chain_file);
      if (chains.ports != lambda.size())
        throw std::invalid_argument("markov spec has " + std::to_string(chains.ports) + " ports, switch has " +
                                    std::to_string(lambda.size()));
      return std::make_unique<MarkovSource>(std::move(chains), seed);
    }
  }
  throw std::logic_error("make_source: unhandled kind");
}

}  // namespace qpsim
