#include <stdexcept>

#include "qpsim/simulator.hpp"

namespace qpsim {

GrowthProbe probe_growth(const SimConfig& config, std::uint64_t slots) {
  config.validate();
  if (slots < 3) throw std::invalid_argument("probe_growth: need at least 3 slots");
  Simulation sim(make_scheduler(config.scheduler, config.n, derive_seed(config.seed, 0)),
                 make_source(config.source, config.rates(), derive_seed(config.seed, 1)),
                 Simulation::Options{false, false});

  const std::uint64_t third = slots / 3;
  double middle = 0.0, last = 0.0;
  for (std::uint64_t t = 0; t < slots; ++t) {
    const auto r = sim.step();
    const auto q = static_cast<double>(r.queue_before);
    if (t >= slots - third) {
      last += q;
    } else if (t >= slots - 2 * third) {
      middle += q;
    }
  }

  GrowthProbe p;
  p.load = config.load;
  p.slots = slots;
  p.middle_mean = middle / static_cast<double>(third);
  p.last_mean = last / static_cast<double>(third);
  p.ratio = p.middle_mean > 0.0 ? p.last_mean / p.middle_mean : (p.last_mean > 0.0 ? kGrowthThreshold * 2 : 1.0);
  p.sustainable = p.last_mean <= kGrowthThreshold * p.middle_mean;
  p.ambiguous = p.ratio >= kAmbiguousLow && p.ratio <= kAmbiguousHigh;
  return p;
}

GrowthProbe probe_load(const SimConfig& config, std::uint64_t slots, bool& flagged) {
  auto p = probe_growth(config, slots);
  if (p.ambiguous) {
    p = probe_growth(config, 2 * slots);
    if (p.ambiguous) flagged = true;
  }
  return p;
}

KneeResult throughput_search(const SimConfig& config, double lo, double hi, double tolerance) {
  if (!(lo > 0.0 && hi < 1.0 && lo < hi)) throw std::invalid_argument("throughput_search: need 0 < lo < hi < 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("throughput_search: tolerance must be positive");

  KneeResult result;
  SimConfig probe = config;
  const std::uint64_t slots = config.min_slots();
  while (hi - lo > tolerance) {
    probe.load = 0.5 * (lo + hi);
    const auto p = probe_load(probe, slots, result.flagged);
    result.probes.push_back(p);
    (p.sustainable ? lo : hi) = probe.load;
  }
  result.knee = 0.5 * (lo + hi);
  return result;
}

}  // namespace qpsim
