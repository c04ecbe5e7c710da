#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nullcollapse/environment.hpp"
#include "nullcollapse/functionals.hpp"
#include "nullcollapse/invariance.hpp"
#include "nullcollapse/sampler.hpp"

// Property checks shared by the CLI `verify` command and the acceptance suite.
// Every check returns a maximum absolute deviation; callers compare it against
// their tolerance.

namespace nullcollapse {

// Random event at a random extent in [0, max_extent]: each cylinder is kept
// with probability 1/2.
inline Event random_event(std::mt19937_64& rng, int max_extent, int factors = 1) {
  const int n = static_cast<int>(rng() % static_cast<std::uint64_t>(max_extent + 1));
  const std::uint64_t count = std::uint64_t{1} << (2 * n * factors);
  std::vector<std::uint64_t> keys;
  for (std::uint64_t k = 0; k < count; ++k)
    if (rng() & 1U) keys.push_back(k);
  return Event(factors, n, std::move(keys));
}

// k pairwise disjoint events at extent n: every cylinder goes to one of the k
// events or to none, uniformly.
inline std::vector<Event> random_disjoint_events(std::mt19937_64& rng, int k, int n, int factors = 1) {
  const std::uint64_t count = std::uint64_t{1} << (2 * n * factors);
  std::vector<std::vector<std::uint64_t>> bins(k);
  for (std::uint64_t c = 0; c < count; ++c) {
    const auto b = rng() % static_cast<std::uint64_t>(k + 1);
    if (b < static_cast<std::uint64_t>(k)) bins[b].push_back(c);
  }
  std::vector<Event> out;
  for (auto& keys : bins) out.push_back(canonical(Event(factors, n, std::move(keys))));
  return out;
}

struct AxiomDeviations {
  double hermiticity = 0.0;
  double additivity = 0.0;
  double refinement = 0.0;
  double positivity = 0.0;
  double normalization = 0.0;

  double worst() const { return std::max({hermiticity, additivity, refinement, positivity, normalization}); }
};

// Hermiticity, additivity (disjoint unions and one-step refinement), positivity
// and normalization on random events up to extent n.
inline AxiomDeviations check_axioms(const DecoherenceFunctional& d, int n, int depth, std::mt19937_64& rng, int trials) {
  AxiomDeviations dev;
  const int f = d.factors();
  const Event omega = Event::omega(f);
  dev.normalization = std::abs(d(omega, omega) - 1.0);
  for (int t = 0; t < trials; ++t) {
    const Event a = random_event(rng, n, f);
    const Event b = random_event(rng, n, f);
    dev.hermiticity = std::max(dev.hermiticity, std::abs(d(a, b) - std::conj(d(b, a))));

    const auto parts = random_disjoint_events(rng, 2, n, f);
    const cplx lhs = d(union_of(parts[0], parts[1]), b);
    dev.additivity = std::max(dev.additivity, std::abs(lhs - d(parts[0], b) - d(parts[1], b)));

    if (a.extent() + 1 <= depth) {
      dev.refinement = std::max(dev.refinement, std::abs(d(refine(a, a.extent() + 1), b) - d(a, b)));
      dev.refinement = std::max(dev.refinement, std::abs(d(b, refine(a, a.extent() + 1)) - d(b, a)));
    }
    const cplx self = d(a, a);
    dev.positivity = std::max({dev.positivity, -self.real(), std::abs(self.imag())});
  }
  return dev;
}

// |D_qc(Omega_q x Cyl(a); Omega_q x Cyl(a')) - D_c(Cyl(a); Cyl(a'))| over all cylinder pairs at extent n.
inline double check_quantum_coarse_graining(const QuantumFunctional& q, const ClassicalFunctional& c, int n) {
  double worst = 0.0;
  const std::uint64_t dim = std::uint64_t{1} << (2 * n);
  for (std::uint64_t a = 0; a < dim; ++a)
    for (std::uint64_t b = 0; b < dim; ++b) {
      const Event ea(1, n, {a}), eb(1, n, {b});
      worst = std::max(worst, std::abs(coarse_grain_quantum(ea, eb, q) - c(ea, eb)));
    }
  return worst;
}

// |D_qc(Cyl(Phi) x Omega_c; Cyl(Phi') x Omega_c) - (2X/(1+X^2))^d D_q| over all cylinder pairs.
inline double check_classical_coarse_graining(const std::shared_ptr<const QuantumFunctional>& q, int n) {
  const DecoheredFunctional closed(q);
  double worst = 0.0;
  const std::uint64_t dim = std::uint64_t{1} << (2 * n);
  for (std::uint64_t a = 0; a < dim; ++a)
    for (std::uint64_t b = 0; b < dim; ++b) {
      const Event ea(1, n, {a}), eb(1, n, {b});
      worst = std::max(worst, std::abs(coarse_grain_classical(ea, eb, *q) - closed(ea, eb)));
    }
  return worst;
}

// sum_alpha X^{d(Phi,alpha)+d(Phi',alpha)} vs 2^m X^m (1+X^2)^{2n-m}, over all pairs at extent n.
inline double check_coupling_sum_identity(int n, double x) {
  double worst = 0.0;
  const auto configs = all_configs(n);
  for (const auto& a : configs)
    for (const auto& b : configs)
      worst = std::max(worst, std::abs(coupling_sum_enumerated(a, b, x) - coupling_sum_closed_form(n, hamming(a, b), x)));
  return worst;
}

// Entrywise |D_qe - D_qc| over all joint cylinder pairs at extent n.
inline double check_environment_equivalence(const CoupledFunctional& qc, const EnvironmentFunctional& qe, int n) {
  double worst = 0.0;
  const std::uint64_t dim = std::uint64_t{1} << (4 * n);
  for (std::uint64_t a = 0; a < dim; ++a)
    for (std::uint64_t b = 0; b < dim; ++b) worst = std::max(worst, std::abs(qe.cylinder(a, b, n) - qc.cylinder(a, b, n)));
  return worst;
}

inline double check_factorization(const Model& model, int n) {
  double worst = 0.0;
  for (const auto& phi : all_configs(n))
    for (const auto& e : all_configs(n)) worst = std::max(worst, factorization_check(phi, e, model));
  return worst;
}

// D_c(Y; Z) = D_c(Y n Z; Y n Z)
inline double check_level_one(const ClassicalFunctional& c, int n, std::mt19937_64& rng, int trials) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Event y = random_event(rng, n), z = random_event(rng, n);
    const Event yz = intersect(y, z);
    worst = std::max(worst, std::abs(c(y, z) - c(yz, yz)));
  }
  return worst;
}

// max |I_k| over random disjoint k-tuples at extent n.
inline double check_interference_vanishes(int k, const Measure& mu, int n, std::mt19937_64& rng, int trials) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto events = random_disjoint_events(rng, k, n);
    worst = std::max(worst, std::abs(interference(k, events, mu)));
  }
  return worst;
}

struct InterferenceWitness {
  Event first;
  Event second;
  double value = 0.0;
};

// Pair of distinct cylinders (extent <= n) with the largest |I_2(mu_q)|.
inline InterferenceWitness find_interference_witness(const QuantumFunctional& q, int n) {
  InterferenceWitness best;
  const Measure mu = [&](const Event& e) { return q.measure(e); };
  for (int m = 1; m <= n; ++m) {
    const std::uint64_t dim = std::uint64_t{1} << (2 * m);
    for (std::uint64_t a = 0; a < dim; ++a)
      for (std::uint64_t b = a + 1; b < dim; ++b) {
        const Event pair[2] = {Event(1, m, {a}), Event(1, m, {b})};
        const double v = interference(2, pair, mu);
        if (std::abs(v) > std::abs(best.value)) best = {pair[0], pair[1], v};
      }
  }
  return best;
}

// Chain rule: product of drawn conditionals against the exact mu_c of the
// sampled cylinder, plus the per-step normalization of the distributions.
inline double check_chain_rule(const ClassicalFunctional& c, std::span<const TrajectoryRecord> records) {
  double worst = 0.0;
  for (const auto& r : records) {
    worst = std::max(worst, std::abs(r.chain_probability - c.measure(cylinder(r.history))));
    for (const auto& p : r.distributions) worst = std::max(worst, std::abs(p[0] + p[1] + p[2] + p[3] - 1.0));
  }
  return worst;
}

}  // namespace nullcollapse
