#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullcollapse/events.hpp"
#include "nullcollapse/hilbert.hpp"
#include "nullcollapse/lattice.hpp"

namespace nullcollapse {

struct PureComponent {
  double weight = 1.0;
  SurfaceState state;
};

// Everything the functionals need: geometry, evolution order, the vertex
// unitaries (indexed by physical vertex id, so they do not move when the
// labelling changes), the initial state as a convex mixture of pure states,
// and the coupling X.
struct Model {
  LatticeGeometry geometry{LatticeSpec{}};
  NaturalLabelling labelling;
  std::vector<VertexUnitary> unitaries;
  std::vector<PureComponent> initial;
  Coupling coupling;

  int depth() const { return geometry.depth(); }
  int slots() const { return geometry.slot_count(); }
  double x() const { return coupling.value(); }

  void validate() const {
    geometry.validate_labelling(labelling);
    if (static_cast<int>(unitaries.size()) != geometry.depth())
      throw std::invalid_argument("need one vertex unitary per vertex (" + std::to_string(geometry.depth()) + ")");
    for (std::size_t v = 0; v < unitaries.size(); ++v) {
      if (unitarity_defect<4>(unitaries[v].matrix) > kOperatorTolerance)
        throw std::invalid_argument("vertex unitary " + std::to_string(v + 1) + " is not unitary");
    }
    if (initial.empty()) throw std::invalid_argument("initial state mixture is empty");
    double total = 0.0;
    for (const auto& c : initial) {
      if (c.weight < 0.0) throw std::invalid_argument("mixture weights must be nonnegative");
      if (c.state.qubits() != slots()) throw std::invalid_argument("initial state has wrong dimension");
      if (std::abs(c.state.norm_squared() - 1.0) > kOperatorTolerance)
        throw std::invalid_argument("initial state component is not normalized");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > kOperatorTolerance) throw std::invalid_argument("mixture weights must sum to 1");
  }

  void check_extent(int n) const {
    if (n < 0 || n > depth())
      throw std::out_of_range("extent " + std::to_string(n) + " exceeds lattice depth " + std::to_string(depth()));
  }

  // Vertex id and slots touched at labelled step i (1-based).
  int vertex_at(int i) const { return labelling.order.at(i - 1); }
  int left_slot(int i) const { return geometry.slot_of(geometry.left_out(vertex_at(i))); }
  int right_slot(int i) const { return geometry.slot_of(geometry.right_out(vertex_at(i))); }

  // R_i on the surface (field) register; works on joint registers too since
  // field slots are the low qubits.
  void evolve(StateVector& s, int i) const {
    const int v = vertex_at(i);
    apply_two(s, geometry.slot_of(geometry.left_in(v)), geometry.slot_of(geometry.right_in(v)), unitaries[v].matrix);
  }

  void project_step(StateVector& s, int i, int outcome) const {
    project(s, left_slot(i), outcome & 1);
    project(s, right_slot(i), (outcome >> 1) & 1);
  }

  void kraus_step(StateVector& s, int i, int outcome) const {
    apply_link_operator(s, left_slot(i), make_kraus(outcome & 1, coupling));
    apply_link_operator(s, right_slot(i), make_kraus((outcome >> 1) & 1, coupling));
  }
};

}  // namespace nullcollapse
