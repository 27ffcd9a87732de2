#include "qpsim/markov.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qpsim {

void MarkovChain::validate(double tol) const {
  const std::size_t s = states();
  if (s == 0) throw std::invalid_argument("markov chain '" + name + "': no states");
  if (transition.size() != s)
    throw std::invalid_argument("markov chain '" + name + "': expected " + std::to_string(s) + " transition rows");
  for (std::size_t r = 0; r < s; ++r) {
    if (transition[r].size() != s)
      throw std::invalid_argument("markov chain '" + name + "': transition row " + std::to_string(r) + " has wrong length");
    double sum = 0.0;
    for (double p : transition[r]) {
      if (!(p >= 0.0)) throw std::invalid_argument("markov chain '" + name + "': negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
      throw std::invalid_argument("markov chain '" + name + "': transition row " + std::to_string(r) + " is not stochastic");
  }
}

std::vector<double> MarkovChain::stationary() const {
  validate();
  const auto s = static_cast<Eigen::Index>(states());
  // Solve (P^T - I) pi = 0 with one equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a(s, s);
  for (Eigen::Index r = 0; r < s; ++r)
    for (Eigen::Index c = 0; c < s; ++c) a(c, r) = transition[r][c] - (r == c ? 1.0 : 0.0);
  a.row(s - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s);
  b(s - 1) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw std::invalid_argument("markov chain '" + name + "': stationary law is not unique");
  const Eigen::VectorXd pi = lu.solve(b);
  std::vector<double> out(pi.data(), pi.data() + s);
  for (auto& p : out) p = std::max(0.0, p);
  return out;
}

double MarkovChain::rate() const {
  const auto pi = stationary();
  double r = 0.0;
  for (std::size_t k = 0; k < states(); ++k) r += pi[k] * static_cast<double>(emission[k]);
  return r;
}

void MarkovSpec::validate() const {
  if (ports == 0) throw std::invalid_argument("markov spec: ports must be positive");
  if (assignment.size() != ports * ports) throw std::invalid_argument("markov spec: assignment size mismatch");
  for (const auto& c : chains) {
    c.validate();
    for (Count e : c.emission)
      if (e > a_max)
        throw std::invalid_argument("markov chain '" + c.name + "': emission " + std::to_string(e) + " exceeds a_max " +
                                    std::to_string(a_max));
  }
  for (int k : assignment)
    if (k >= static_cast<int>(chains.size())) throw std::invalid_argument("markov spec: bad chain index");
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::invalid_argument("markov spec line " + std::to_string(line) + ": " + what);
}

}  // namespace

MarkovSpec MarkovSpec::parse(std::istream& in) {
  MarkovSpec spec;
  std::map<std::string, int> by_name;
  std::vector<std::tuple<std::size_t, std::string, std::string, std::string>> assigns;  // line, i, j, name
  MarkovChain* open = nullptr;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string word;
    if (!(line >> word)) continue;

    if (word == "ports") {
      if (!(line >> spec.ports) || spec.ports == 0) fail(line_no, "ports expects a positive integer");
    } else if (word == "a_max") {
      if (!(line >> spec.a_max)) fail(line_no, "a_max expects an integer");
    } else if (word == "chain") {
      if (open) fail(line_no, "nested chain (missing 'end')");
      std::string name;
      if (!(line >> name)) fail(line_no, "chain expects a name");
      if (by_name.count(name)) fail(line_no, "duplicate chain '" + name + "'");
      by_name[name] = static_cast<int>(spec.chains.size());
      spec.chains.push_back(MarkovChain{name, {}, {}});
      open = &spec.chains.back();
    } else if (word == "row" || word == "emit") {
      if (!open) fail(line_no, "'" + word + "' outside a chain block");
      if (word == "row") {
        std::vector<double> row;
        double p = 0.0;
        while (line >> p) row.push_back(p);
        if (!line.eof()) fail(line_no, "row expects numbers");
        open->transition.push_back(std::move(row));
      } else {
        Count e = 0;
        while (line >> e) open->emission.push_back(e);
        if (!line.eof()) fail(line_no, "emit expects nonnegative integers");
      }
    } else if (word == "end") {
      if (!open) fail(line_no, "'end' without chain");
      try {
        open->validate();
      } catch (const std::invalid_argument& e) {
        fail(line_no, e.what());
      }
      open = nullptr;
    } else if (word == "assign") {
      std::vector<std::string> args;
      std::string a;
      while (line >> a) args.push_back(a);
      if (args.size() == 2 && args[0] == "*") {
        assigns.emplace_back(line_no, "*", "*", args[1]);
      } else if (args.size() == 3) {
        assigns.emplace_back(line_no, args[0], args[1], args[2]);
      } else {
        fail(line_no, "assign expects '* <chain>' or '<i> <j> <chain>'");
      }
    } else {
      fail(line_no, "unknown directive '" + word + "'");
    }
  }
  if (open) throw std::invalid_argument("markov spec: chain '" + open->name + "' missing 'end'");
  if (spec.ports == 0) throw std::invalid_argument("markov spec: missing 'ports'");

  spec.assignment.assign(spec.ports * spec.ports, -1);
  for (const auto& [ln, si, sj, name] : assigns) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) fail(ln, "unknown chain '" + name + "'");
    if (si == "*") {
      std::fill(spec.assignment.begin(), spec.assignment.end(), it->second);
      continue;
    }
    std::size_t i = 0, j = 0;
    try {
      i = std::stoul(si);
      j = std::stoul(sj);
    } catch (const std::exception&) {
      fail(ln, "assign indices must be integers");
    }
    if (i >= spec.ports || j >= spec.ports) fail(ln, "assign index out of range");
    spec.assignment[i * spec.ports + j] = it->second;
  }
  spec.validate();
  return spec;
}

MarkovSpec MarkovSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open markov spec '" + path + "'");
  return parse(in);
}

}  // namespace qpsim
