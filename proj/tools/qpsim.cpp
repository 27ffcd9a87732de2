#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qpsim/bounds_report.hpp"
#include "qpsim/experiment.hpp"
#include "qpsim/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitNonConverged = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolves the output path (flag beats config) and checks its directory.
// Empty result means stdout.
std::string output_path(const std::string& flag, const qpsim::ExperimentConfig& config) {
  const std::string path = flag.empty() ? config.out : flag;
  if (path.empty() || path == "-") return {};
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw UsageError("output directory does not exist: " + parent.string());
  return path;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path);
  write(out);
}

struct CommonFlags {
  std::string config;
  std::string out;
  unsigned jobs = 0;
  std::uint64_t seed_base = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "CSV output path (default: config 'out', else stdout)");
  cmd->add_option("--jobs", f.jobs, "worker threads (0: all cores)");
  cmd->add_option("--seed-base", f.seed_base, "offset added to every seed");
}

int run_cmd(const CommonFlags& f, qpsim::SweepAxis axis) {
  auto config = qpsim::ExperimentConfig::load(f.config);
  qpsim::apply_sweep(config, axis);
  const auto path = output_path(f.out, config);
  const auto summary = qpsim::run_experiment(config, f.jobs, f.seed_base);
  emit(path, [&](std::ostream& os) { qpsim::write_results_csv(os, summary.rows); });
  if (summary.non_converged > 0) {
    std::cerr << "warning: " << summary.non_converged << " run(s) hit max_slots before reaching the precision target\n";
    return kExitNonConverged;
  }
  return kExitOk;
}

int throughput_cmd(const CommonFlags& f) {
  const auto config = qpsim::ExperimentConfig::load(f.config);
  const auto path = output_path(f.out, config);
  const auto rows = qpsim::run_throughput(config, f.jobs, f.seed_base);
  emit(path, [&](std::ostream& os) { qpsim::write_knee_csv(os, rows); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Input-queued switch scheduling simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_burst_flags, sweep_n_flags, sweep_r_flags, tp_flags;
  auto* run = app.add_subcommand("run", "run every point of an experiment config");
  add_common(run, run_flags);
  auto* sweep_burst = app.add_subcommand("sweep-burst", "run with burst sizes 16..1024");
  add_common(sweep_burst, sweep_burst_flags);
  auto* sweep_n = app.add_subcommand("sweep-n", "run with port counts 8..512");
  add_common(sweep_n, sweep_n_flags);
  auto* sweep_r = app.add_subcommand("sweep-r", "run QPS with r = 1..4");
  add_common(sweep_r, sweep_r_flags);
  auto* throughput = app.add_subcommand("throughput", "bisect the throughput knee per scheduler/pattern/n");
  add_common(throughput, tp_flags);

  qpsim::VerifyOptions vopts;
  std::string verify_out;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "oracle and property verification suite");
  verify->add_option("--n-max", vopts.n_max, "largest switch size for the exact oracle")->check(CLI::Range(2, 6));
  verify->add_option("--trials", vopts.trials, "random instances per size");
  verify->add_option("--seed", vopts.seed, "seed");
  verify->add_option("--out", verify_out, "CSV report path (default: stdout)");
  verify->add_option("--fault", fault, "inject a broken scheduler")->check(CLI::IsMember({"never-match"}));

  qpsim::BoundsRequest breq;
  std::string pattern = "uniform";
  std::string source = "bernoulli";
  double xi = 0.0;
  std::size_t k = 0;
  auto* bounds = app.add_subcommand("bounds", "evaluate the analytic delay and queue-length bounds");
  bounds->add_option("--pattern", pattern, "traffic pattern");
  bounds->add_option("--n", breq.n, "ports")->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  bounds->add_option("--load", breq.load, "offered load");
  bounds->add_option("--source", source, "bernoulli | onoff:burst=B | markov:file=PATH");
  auto* xi_opt = bounds->add_option("--xi", xi, "mixing contraction for the Markovian bound");
  auto* k_opt = bounds->add_option("--k", k, "autocovariance horizon for the Markovian bound");
  bounds->add_option("--seed", breq.seed, "seed for estimated moments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return run_cmd(run_flags, qpsim::SweepAxis::none);
    if (*sweep_burst) return run_cmd(sweep_burst_flags, qpsim::SweepAxis::burst);
    if (*sweep_n) return run_cmd(sweep_n_flags, qpsim::SweepAxis::ports);
    if (*sweep_r) return run_cmd(sweep_r_flags, qpsim::SweepAxis::iterations);
    if (*throughput) return throughput_cmd(tp_flags);

    if (*verify) {
      if (fault == "never-match") {
        const qpsim::SchedulerFactory broken = [](std::size_t, std::uint64_t) { return qpsim::make_never_match_scheduler(); };
        vopts.weak_under_test = broken;
        vopts.strong_under_test = broken;
      }
      std::optional<std::string> path;
      if (!verify_out.empty() && verify_out != "-") {
        const auto parent = std::filesystem::path(verify_out).parent_path();
        if (!parent.empty() && !std::filesystem::is_directory(parent))
          throw UsageError("output directory does not exist: " + parent.string());
        path = verify_out;
      }
      const auto report = qpsim::run_verification(vopts);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      emit(path.value_or(""), [&](std::ostream& os) { qpsim::write_verify_csv(os, report); });
      std::cerr << (report.pass() ? "verify: PASS\n" : "verify: FAIL\n");
      return report.pass() ? kExitOk : kExitVerifyFailed;
    }

    if (*bounds) {
      breq.pattern = qpsim::parse_pattern(pattern);
      breq.source = qpsim::SourceSpec::parse(source);
      if (*xi_opt) breq.xi = xi;
      if (*k_opt) breq.k = k;
      qpsim::print_bounds(std::cout, qpsim::evaluate_bounds(breq));
      return kExitOk;
    }
  } catch (const qpsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
