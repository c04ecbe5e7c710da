#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullcollapse/functionals.hpp"

namespace nullcollapse {

// Probabilities at or below this are treated as exact zeros of the measure.
inline constexpr double kZeroMeasure = 1e-14;

using StepDistribution = std::array<double, 4>;  // outcome = bit(l_{2i-1}) + 2 bit(l_{2i})

struct TrajectoryRecord {
  std::uint64_t seed = 0;   // seed of this trajectory's generator
  std::uint64_t index = 0;  // position within its ensemble
  FieldConfig history;
  std::vector<StepDistribution> distributions;
  std::vector<double> conditionals;  // probability of the outcome actually drawn
  double chain_probability = 1.0;    // product of conditionals
  SurfaceState final_state;          // normalized Kraus-chain branch (pure initial state only)
};

namespace detail {

// Unnormalized Kraus-chain branches, one per mixture component.
struct ChainState {
  std::vector<SurfaceState> branches;

  double measure(const Model& model) const {
    double m = 0.0;
    for (std::size_t c = 0; c < branches.size(); ++c) m += model.initial[c].weight * branches[c].norm_squared();
    return m;
  }
};

inline ChainState start_chain(const FieldConfig& prefix, const Model& model) {
  ChainState s;
  for (const auto& comp : model.initial) s.branches.push_back(run_chain(prefix, model, comp.state, ChainKind::kraus));
  return s;
}

inline std::array<ChainState, 4> children(const ChainState& parent, const Model& model, int step) {
  std::array<ChainState, 4> out;
  for (const auto& b : parent.branches) {
    SurfaceState evolved = b;
    model.evolve(evolved, step);
    for (int o = 0; o < 4; ++o) {
      SurfaceState child = evolved;
      model.kraus_step(child, step, o);
      out[o].branches.push_back(std::move(child));
    }
  }
  return out;
}

inline StepDistribution distribution(const ChainState& parent, const std::array<ChainState, 4>& kids,
                                     const Model& model) {
  const double base = parent.measure(model);
  if (base <= kZeroMeasure) throw std::domain_error("prefix has zero collapse-model measure");
  StepDistribution p{};
  double total = 0.0;
  for (int o = 0; o < 4; ++o) {
    p[o] = kids[o].measure(model) / base;
    if (p[o] <= kZeroMeasure) p[o] = 0.0;
    total += p[o];
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace detail

// Conditional law of the next vertex's two outcomes given the history so far.
inline StepDistribution step_distribution(const FieldConfig& prefix, const Model& model) {
  if (prefix.extent >= model.depth())
    throw std::out_of_range("prefix extent " + std::to_string(prefix.extent) + " leaves no vertex to sample");
  const auto parent = detail::start_chain(prefix, model);
  return detail::distribution(parent, detail::children(parent, model, prefix.extent + 1), model);
}

// branch_c(prefix) / |branch_c(prefix)|
inline SurfaceState conditioned_state(const FieldConfig& prefix, const Model& model) {
  if (model.initial.size() != 1)
    throw std::invalid_argument("conditioned state is defined for a pure initial state only");
  SurfaceState s = branch_c(prefix, model).state;
  const double n2 = s.norm_squared();
  if (n2 <= kZeroMeasure) throw std::domain_error("prefix has zero collapse-model measure");
  s *= 1.0 / std::sqrt(n2);
  return s;
}

inline TrajectoryRecord sample_trajectory(const Model& model, int steps, std::uint64_t seed, std::uint64_t index = 0) {
  model.validate();
  model.check_extent(steps);
  std::mt19937_64 rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.index = index;
  auto state = detail::start_chain(FieldConfig{}, model);
  for (int i = 1; i <= steps; ++i) {
    auto kids = detail::children(state, model, i);
    const auto p = detail::distribution(state, kids, model);
    const double u = uniform01(rng);
    int chosen = -1;
    double cumulative = 0.0;
    for (int o = 0; o < 4; ++o) {
      if (p[o] == 0.0) continue;
      cumulative += p[o];
      chosen = o;
      if (u < cumulative) break;
    }
    rec.distributions.push_back(p);
    rec.conditionals.push_back(p[chosen]);
    rec.chain_probability *= p[chosen];
    rec.history = rec.history.extended(chosen);
    state = std::move(kids[chosen]);
  }
  if (state.branches.size() == 1) {
    rec.final_state = state.branches.front();
    rec.final_state *= 1.0 / rec.final_state.norm();
  }
  return rec;
}

// Trajectory k draws from its own generator seeded with derive_seed(seed, k),
// so results do not depend on evaluation order.
inline std::vector<TrajectoryRecord> sample_ensemble(const Model& model, int steps, std::uint64_t count,
                                                     std::uint64_t seed) {
  std::vector<TrajectoryRecord> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) out.push_back(sample_trajectory(model, steps, derive_seed(seed, k), k));
  return out;
}

}  // namespace nullcollapse
