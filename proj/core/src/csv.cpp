#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "qpsim/experiment.hpp"

namespace qpsim {

// Doubles are written in shortest round-trip form, so reading a file back
// reproduces every numeric field exactly.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsCsvVersion << '\n' << kResultsCsvHeader << '\n';
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.scheduler, r.pattern, r.n, r.load, r.burst, r.seed,
                       r.slots, r.mean_delay, r.ci, r.mean_queue, r.converged ? 1 : 0);
}

void write_knee_csv(std::ostream& out, const std::vector<KneeRow>& rows) {
  out << kKneeCsvVersion << '\n' << kKneeCsvHeader << '\n';
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.scheduler, r.pattern, r.n, r.burst, r.seed, r.lo, r.hi,
                       r.tolerance, r.knee, r.probes, r.flagged ? 1 : 0);
}

namespace {

template <typename T>
T parse_field(const std::string& text, std::size_t line, const char* name) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError("results csv line " + std::to_string(line) + ": bad " + name + " '" + text + "'");
  return v;
}

}  // namespace

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kResultsCsvHeader) throw ConfigError("results csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw ConfigError("results csv line " + std::to_string(line_no) + ": expected 11 fields");
    ResultRow r;
    r.scheduler = f[0];
    r.pattern = f[1];
    r.n = parse_field<std::size_t>(f[2], line_no, "n");
    r.load = parse_field<double>(f[3], line_no, "load");
    r.burst = parse_field<double>(f[4], line_no, "burst");
    r.seed = parse_field<std::uint64_t>(f[5], line_no, "seed");
    r.slots = parse_field<std::uint64_t>(f[6], line_no, "slots");
    r.mean_delay = parse_field<double>(f[7], line_no, "mean_delay");
    r.ci = parse_field<double>(f[8], line_no, "ci");
    r.mean_queue = parse_field<double>(f[9], line_no, "mean_queue");
    r.converged = parse_field<int>(f[10], line_no, "converged") != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace qpsim
