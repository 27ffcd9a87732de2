#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qpsim/markov.hpp"
#include "qpsim/matrix.hpp"
#include "qpsim/traffic.hpp"

namespace qpsim {

/// Stochastic process producing one arrival matrix per slot.
class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  virtual std::size_t size() const = 0;
  /// Overwrites `out` with the next slot's arrivals.
  virtual void next(ArrivalMatrix& out) = 0;
  /// Upper bound on any single entry of an emitted matrix.
  virtual Count a_max() const = 0;
  /// Long-run per-VOQ arrival rates.
  virtual const TrafficRateMatrix& rates() const = 0;
  virtual std::string name() const = 0;
};

/// Independent Bernoulli(lambda_ij) arrivals in every cell.
///
/// Cells are grouped by equal rate and each group is walked with geometric
/// skips, so a slot costs O(arrivals + distinct rates) rather than O(N^2).
class BernoulliSource final : public ArrivalSource {
 public:
  BernoulliSource(TrafficRateMatrix rates, std::uint64_t seed);

  std::size_t size() const override { return rates_.size(); }
  void next(ArrivalMatrix& out) override;
  Count a_max() const override { return 1; }
  const TrafficRateMatrix& rates() const override { return rates_; }
  std::string name() const override { return "bernoulli"; }

 private:
  struct Group {
    double rate;
    std::vector<std::uint32_t> cells;
    std::geometric_distribution<std::uint64_t> skip;
  };

  TrafficRateMatrix rates_;
  std::vector<Group> groups_;
  Rng rng_;
};

/// Two-phase bursty source, one modulator per input port.
///
/// A packet arrives at input i with probability equal to the row load in
/// every slot. In the OFF phase its destination is drawn from the row's
/// destination law; in the ON phase every packet goes to the burst
/// destination drawn when the phase began. Phase lengths t >= 0 are
/// geometric: P_on(t) = p(1-p)^t and P_off(t) = q(1-q)^t, with
/// p = 1/(mean_burst + 1) and q = 1/(off_mean + 1).
class OnOffSource final : public ArrivalSource {
 public:
  /// off_mean defaults to mean_burst. Requires mean_burst >= 1.
  OnOffSource(TrafficRateMatrix rates, double mean_burst, std::uint64_t seed, std::optional<double> off_mean = {});

  std::size_t size() const override { return rates_.size(); }
  void next(ArrivalMatrix& out) override;
  Count a_max() const override { return 1; }
  const TrafficRateMatrix& rates() const override { return rates_; }
  std::string name() const override;

  double on_parameter() const { return p_on_; }
  double off_parameter() const { return p_off_; }

  struct PortState {
    bool on = false;
    std::uint64_t remaining = 0;  // slots left in the current phase
    std::size_t destination = 0;
  };
  const PortState& port_state(std::size_t i) const { return ports_[i]; }

 private:
  void begin_phase(std::size_t i, bool on);

  TrafficRateMatrix rates_;
  double mean_burst_;
  double p_on_;
  double p_off_;
  std::vector<double> row_load_;
  std::vector<std::discrete_distribution<std::size_t>> destination_;
  std::vector<PortState> ports_;
  Rng rng_;
};

/// Markov-modulated arrivals: each VOQ runs its own copy of its assigned
/// chain, started from the chain's stationary law.
class MarkovSource final : public ArrivalSource {
 public:
  MarkovSource(MarkovSpec spec, std::uint64_t seed);

  std::size_t size() const override { return spec_.ports; }
  void next(ArrivalMatrix& out) override;
  Count a_max() const override { return spec_.a_max; }
  const TrafficRateMatrix& rates() const override { return rates_; }
  std::string name() const override { return "markov"; }

  const MarkovSpec& spec() const { return spec_; }

 private:
  MarkovSpec spec_;
  TrafficRateMatrix rates_;
  std::vector<std::vector<std::discrete_distribution<std::size_t>>> step_;  // per chain, per state
  std::vector<std::size_t> state_;                                           // per VOQ
  Rng rng_;
};

/// Parsed form of "bernoulli", "onoff:burst=256[,off=64]", "markov:file=<path>".
struct SourceSpec {
  enum class Kind { bernoulli, onoff, markov };

  Kind kind = Kind::bernoulli;
  double burst = 0.0;
  std::optional<double> off_mean;
  std::string chain_file;

  static SourceSpec parse(std::string_view text);
  std::string to_string() const;
};

/// `lambda` drives bernoulli and onoff sources; markov sources take their
/// rates from the chain file, whose port count must equal lambda.size().
std::unique_ptr<ArrivalSource> make_source(const SourceSpec& spec, const TrafficRateMatrix& lambda, std::uint64_t seed);

}  // namespace qpsim
