#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nullcollapse/environment.hpp"
#include "nullcollapse/functionals.hpp"

namespace nullcollapse {

// Smallest m >= from_extent at which both labellings have evolved over the
// same set of vertices; -1 if none within the lattice.
inline int common_prefix_extent(const NaturalLabelling& a, const NaturalLabelling& b, int from_extent) {
  for (int m = from_extent; m <= std::min(a.size(), b.size()); ++m) {
    std::vector<int> x(a.order.begin(), a.order.begin() + m);
    std::vector<int> y(b.order.begin(), b.order.begin() + m);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x == y) return m;
  }
  return -1;
}

// Re-expresses an event written in link labels of `from` in the labels of
// `to`. The same set of physical histories results.
inline Event translate_event(const Event& e, const LatticeGeometry& geometry, const NaturalLabelling& from,
                             const NaturalLabelling& to) {
  const int m = common_prefix_extent(from, to, e.extent());
  if (m < 0) throw std::invalid_argument("labellings never cover the same vertices beyond this extent");
  const Event r = refine(e, m);
  std::map<int, int> position_in_to;  // physical link -> 0-based bit in `to`
  for (int b = 1; b <= 2 * m; ++b) position_in_to[geometry.labelled_link(to, b)] = b - 1;
  std::vector<int> target(2 * m);
  for (int a = 1; a <= 2 * m; ++a) target[a - 1] = position_in_to.at(geometry.labelled_link(from, a));
  std::vector<std::uint64_t> keys;
  keys.reserve(r.size());
  for (auto key : r.keys()) {
    std::uint64_t packed = 0;
    for (int f = 0; f < r.factors(); ++f) {
      const FieldConfig part = r.part(key, f);
      std::uint64_t bits = 0;
      for (int a = 0; a < 2 * m; ++a)
        if ((part.bits >> a) & 1U) bits |= std::uint64_t{1} << target[a];
      packed |= bits << (2 * m * f);
    }
    keys.push_back(packed);
  }
  return Event(r.factors(), m, std::move(keys));
}

struct InvarianceReport {
  std::map<std::string, double> max_deviation;  // by functional name

  double worst() const {
    double w = 0.0;
    for (const auto& [name, d] : max_deviation) w = std::max(w, d);
    return w;
  }
};

// All ordered pairs of cylinders at extent n on a space with `factors` factors.
inline std::vector<std::pair<Event, Event>> all_cylinder_pairs(int n, int factors) {
  const std::uint64_t dim = std::uint64_t{1} << (2 * n * factors);
  std::vector<std::pair<Event, Event>> out;
  out.reserve(dim * dim);
  for (std::uint64_t a = 0; a < dim; ++a)
    for (std::uint64_t b = 0; b < dim; ++b)
      out.emplace_back(Event(factors, n, {a}), Event(factors, n, {b}));
  return out;
}

// Max |D(A;B) - D'(A';B')| where D' is built with `alt` and A', B' are the
// translated events. Single-factor pairs exercise q, c and qtilde; two-factor
// pairs exercise qc and qe.
inline InvarianceReport labelling_invariance_check(const Model& model, const NaturalLabelling& alt,
                                                   std::span<const std::pair<Event, Event>> pairs,
                                                   bool include_environment = true) {
  const NaturalLabelling checked = model.geometry.validate_labelling(alt);
  Model other = model;
  other.labelling = checked;

  auto q1 = std::make_shared<QuantumFunctional>(model);
  auto q2 = std::make_shared<QuantumFunctional>(other);
  std::vector<std::pair<std::unique_ptr<DecoherenceFunctional>, std::unique_ptr<DecoherenceFunctional>>> fs;
  fs.emplace_back(std::make_unique<QuantumFunctional>(model), std::make_unique<QuantumFunctional>(other));
  fs.emplace_back(std::make_unique<ClassicalFunctional>(model), std::make_unique<ClassicalFunctional>(other));
  fs.emplace_back(std::make_unique<DecoheredFunctional>(q1), std::make_unique<DecoheredFunctional>(q2));
  fs.emplace_back(std::make_unique<CoupledFunctional>(q1), std::make_unique<CoupledFunctional>(q2));
  if (include_environment)
    fs.emplace_back(std::make_unique<EnvironmentFunctional>(model), std::make_unique<EnvironmentFunctional>(other));

  InvarianceReport report;
  for (const auto& [d1, d2] : fs) {
    double worst = 0.0;
    bool used = false;
    for (const auto& [a, b] : pairs) {
      if (a.factors() != d1->factors()) continue;
      used = true;
      const Event ta = translate_event(a, model.geometry, model.labelling, checked);
      const Event tb = translate_event(b, model.geometry, model.labelling, checked);
      worst = std::max(worst, std::abs((*d1)(a, b) - (*d2)(ta, tb)));
    }
    if (used) report.max_deviation[d1->name()] = worst;
  }
  return report;
}

// First adjacent pair of spacelike vertices in the labelling, swapped; empty
// order if every adjacent pair is causally related.
inline NaturalLabelling spacelike_transposition(const Model& model) {
  NaturalLabelling alt = model.labelling;
  for (int i = 0; i + 1 < alt.size(); ++i) {
    if (model.geometry.spacelike(alt.order[i], alt.order[i + 1])) {
      std::swap(alt.order[i], alt.order[i + 1]);
      return alt;
    }
  }
  return NaturalLabelling{};
}

}  // namespace nullcollapse
