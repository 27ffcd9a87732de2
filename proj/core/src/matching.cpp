#include "qpsim/matching.hpp"

#include <algorithm>
#include <set>

namespace qpsim {

bool Matching::contains(Edge e) const { return std::find(edges_.begin(), edges_.end(), e) != edges_.end(); }

Count Matching::weight(const QueueMatrix& q) const {
  Count w = 0;
  for (const auto& e : edges_) w += q.at(e.input, e.output);
  return w;
}

std::vector<Edge> Matching::sorted() const {
  std::vector<Edge> out = edges_;
  std::sort(out.begin(), out.end());
  return out;
}

bool is_matching(const Matching& m) {
  std::set<std::size_t> inputs;
  std::set<std::size_t> outputs;
  for (const auto& e : m.edges()) {
    if (!inputs.insert(e.input).second) return false;
    if (!outputs.insert(e.output).second) return false;
  }
  return true;
}

bool is_maximal(const Matching& m, const QueueMatrix& q) {
  const std::size_t n = q.size();
  PortSet free_inputs(n, true);
  PortSet free_outputs(n, true);
  for (const auto& e : m.edges()) {
    free_inputs.reset(e.input);
    free_outputs.reset(e.output);
  }
  bool addable = false;
  free_inputs.for_each([&](std::size_t i) {
    if (!addable && q.nonempty_outputs(i).first_common_from(free_outputs, 0)) addable = true;
  });
  return !addable;
}

DepartureMatrix departures_from(const Matching& m, const QueueMatrix& q) {
  DepartureMatrix d(q.size());
  for (const auto& e : m.edges())
    if (q.at(e.input, e.output) > 0) d.set(e.input, e.output, true);
  return d;
}

}  // namespace qpsim
