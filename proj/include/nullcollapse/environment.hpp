#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullcollapse/functionals.hpp"

namespace nullcollapse {

// Joint register: the 2N field slots are qubits 0..2N-1; the environment qubit
// of labelled link l_a is qubit 2N + a - 1. Environment qubits beyond the
// current step are left implicit in |0>.
inline constexpr int kMaxJointQubits = 24;

inline int environment_qubit(const Model& model, int a) { return model.slots() + a - 1; }

// |Phi^n, E^n>_qe = Q P Q P U U R_n ... Q_2 P_2 Q_1 P_1 U_2 U_1 R_1 |Psi_0>
inline StateVector joint_branch(const FieldConfig& field, const FieldConfig& env, const Model& model,
                                const SurfaceState& psi0) {
  if (field.extent != env.extent)
    throw std::invalid_argument("field and environment configs need equal extents");
  model.check_extent(field.extent);
  if (model.slots() + 2 * field.extent > kMaxJointQubits)
    throw std::length_error("joint dimension 2^" + std::to_string(model.slots() + 2 * field.extent) +
                            " exceeds the 2^" + std::to_string(kMaxJointQubits) + " memory guard");
  const auto u = make_partial_measurement(model.coupling);
  StateVector s = psi0;
  for (int i = 1; i <= field.extent; ++i) {
    model.evolve(s, i);
    s = s.extended(2);
    const int a1 = 2 * i - 1, a2 = 2 * i;
    apply_two(s, model.left_slot(i), environment_qubit(model, a1), u.matrix);
    apply_two(s, model.right_slot(i), environment_qubit(model, a2), u.matrix);
    project(s, model.left_slot(i), field.value(a1));
    project(s, environment_qubit(model, a1), env.value(a1));
    project(s, model.right_slot(i), field.value(a2));
    project(s, environment_qubit(model, a2), env.value(a2));
  }
  return s;
}

inline StateVector joint_branch(const FieldConfig& field, const FieldConfig& env, const Model& model, int component = 0) {
  return joint_branch(field, env, model, model.initial.at(component).state);
}

// X^{d(Phi,E)} / (1+X^2)^n |Phi^n>_q (x) |E^n>
inline StateVector factorized_joint_branch(const FieldConfig& field, const FieldConfig& env, const Model& model,
                                           int component = 0) {
  const int n = field.extent;
  const double x = model.x();
  const SurfaceState phi = branch_q(field, model, component).state;
  const double scale = coupling_power(x, hamming(field, env)) / std::pow(1.0 + x * x, n);
  StateVector out(model.slots() + 2 * n);
  const std::uint64_t env_offset = env.bits << model.slots();
  for (std::size_t k = 0; k < phi.dimension(); ++k) out[k | env_offset] = scale * phi[k];
  return out;
}

inline double factorization_check(const FieldConfig& field, const FieldConfig& env, const Model& model) {
  double worst = 0.0;
  for (int c = 0; c < static_cast<int>(model.initial.size()); ++c)
    worst = std::max(worst, max_abs_difference(joint_branch(field, env, model, c),
                                               factorized_joint_branch(field, env, model, c)));
  return worst;
}

// D_qe(Cyl(Phi,E); Cyl(Phi',E')) = <Phi,E|Phi',E'> extended by additivity.
class EnvironmentFunctional : public DecoherenceFunctional {
 public:
  explicit EnvironmentFunctional(Model model) : model_(std::move(model)) { model_.validate(); }

  std::string name() const override { return "qe"; }
  int factors() const override { return 2; }
  const Model& model() const { return model_; }

  cplx operator()(const Event& a, const Event& b) const override {
    auto [ra, rb] = align(a, b, model_.depth());
    const int n = ra.extent();
    const auto& tables = branches(n);
    const int qubits = model_.slots() + 2 * n;
    cplx total{};
    for (std::size_t c = 0; c < tables.size(); ++c) {
      StateVector sa(qubits), sb(qubits);
      for (auto k : ra.keys()) sa += tables[c][k];
      for (auto k : rb.keys()) sb += tables[c][k];
      total += model_.initial[c].weight * inner_product(sa, sb);
    }
    return total;
  }

  cplx cylinder(std::uint64_t a, std::uint64_t b, int n) const override {
    const auto& tables = branches(n);
    cplx total{};
    for (std::size_t c = 0; c < tables.size(); ++c)
      total += model_.initial[c].weight * inner_product(tables[c][a], tables[c][b]);
    return total;
  }

  // Joint branches for every (Phi, E) at extent n, indexed by joint key.
  const std::vector<std::vector<StateVector>>& branches(int n) const {
    model_.check_extent(n);
    if (model_.slots() + 2 * n > kMaxJointQubits) throw std::length_error("joint dimension exceeds memory guard");
    return branches_.get(n, [this](int m) {
      std::vector<std::vector<StateVector>> out;
      const std::uint64_t count = std::uint64_t{1} << (4 * m);
      for (int c = 0; c < static_cast<int>(model_.initial.size()); ++c) {
        std::vector<StateVector> table;
        table.reserve(count);
        for (std::uint64_t key = 0; key < count; ++key)
          table.push_back(joint_branch(Event::unpack(key, 0, m), Event::unpack(key, 1, m), model_, c));
        out.push_back(std::move(table));
      }
      return out;
    });
  }

 private:
  Model model_;
  ExtentCache<std::vector<std::vector<StateVector>>> branches_;
};

inline cplx d_qe(const Event& a, const Event& b, const Model& m) { return EnvironmentFunctional(m)(a, b); }

}  // namespace nullcollapse
