#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nullcollapse/hilbert.hpp"
#include "nullcollapse/lattice.hpp"
#include "nullcollapse/model.hpp"

namespace nullcollapse {

using json = nlohmann::json;

// Raised for any invalid run configuration; the message starts with the
// offending field path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  LatticeSpec lattice{2, 4};
  std::optional<std::vector<int>> labelling;  // 1-based; row-major when absent
  json unitaries = json{{"preset", "random"}, {"seed", 42}};
  json initial_state = json::object();
  std::vector<double> couplings{0.3};
  int extent = 2;
  std::optional<double> tolerance;
  std::string functional = "q";
  int steps = 2;
  std::uint64_t count = 1000;
  std::uint64_t seed = 2026;
  int trials = 50;
};

namespace detail {

inline double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

inline int int_at(const json& j, const std::string& field, int lo, int hi) {
  if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi) throw ConfigError(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

inline std::uint64_t uint_at(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ConfigError(field, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

inline cplx complex_at(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(field, "expected a [re, im] pair");
  return {number_at(j[0], field + "[0]"), number_at(j[1], field + "[1]")};
}

inline double coupling_at(const json& j, const std::string& field) {
  const double x = number_at(j, field);
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(field, "coupling X must lie in [0, 1], got " + j.dump());
  return x;
}

inline VertexUnitary unitary_from(const json& spec, const std::string& field, int vertex) {
  if (!spec.is_object()) throw ConfigError(field, "expected an object");
  if (spec.contains("matrix")) {
    const json& m = spec["matrix"];
    if (!m.is_array() || m.size() != 4) throw ConfigError(field + ".matrix", "expected 4 rows");
    Mat4 mat{};
    for (int r = 0; r < 4; ++r) {
      if (!m[r].is_array() || m[r].size() != 4) throw ConfigError(field + ".matrix", "expected 4 columns per row");
      for (int c = 0; c < 4; ++c)
        mat[4 * r + c] = complex_at(m[r][c], field + ".matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    try {
      return VertexUnitary::from_matrix(mat);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field + ".matrix", e.what());
    }
  }
  const std::string preset = spec.value("preset", std::string{});
  if (preset == "identity") return identity_unitary();
  if (preset == "swap") return swap_unitary();
  if (preset == "rotation") {
    if (!spec.contains("angles") || !spec["angles"].is_array() || spec["angles"].size() != 2)
      throw ConfigError(field + ".angles", "rotation needs two angles");
    return rotation_unitary(number_at(spec["angles"][0], field + ".angles[0]"),
                            number_at(spec["angles"][1], field + ".angles[1]"));
  }
  if (preset == "random") {
    const std::uint64_t seed = spec.contains("seed") ? uint_at(spec["seed"], field + ".seed") : 42;
    return random_unitary(derive_seed(seed, static_cast<std::uint64_t>(vertex)));
  }
  throw ConfigError(field + ".preset", "unknown preset \"" + preset + "\" (identity, swap, rotation, random)");
}

inline SurfaceState pure_state_from(const json& spec, const std::string& field, int width) {
  if (spec.contains("basis")) {
    if (!spec["basis"].is_string()) throw ConfigError(field + ".basis", "expected a bit-string");
    try {
      return basis_initial_state(spec["basis"].get<std::string>(), width);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field + ".basis", e.what());
    }
  }
  if (spec.contains("amplitudes")) {
    const json& a = spec["amplitudes"];
    if (!a.is_array()) throw ConfigError(field + ".amplitudes", "expected an array of [re, im] pairs");
    std::vector<cplx> amps;
    for (std::size_t k = 0; k < a.size(); ++k)
      amps.push_back(complex_at(a[k], field + ".amplitudes[" + std::to_string(k) + "]"));
    try {
      return explicit_initial_state(std::move(amps), width);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field + ".amplitudes", e.what());
    }
  }
  return StateVector::basis(2 * width, 0);
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const std::vector<std::string> known = {"lattice", "labelling",  "unitaries", "initial_state", "coupling",
                                                 "extent",  "tolerance",  "functional", "steps",         "count",
                                                 "seed",    "trials"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError(key, "unknown field");

  RunConfig c;
  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    if (!l.is_object()) throw ConfigError("lattice", "expected an object");
    if (l.contains("width")) c.lattice.width = detail::int_at(l["width"], "lattice.width", 1, 8);
    if (l.contains("depth")) c.lattice.depth = detail::int_at(l["depth"], "lattice.depth", 1, 24);
  }
  if (j.contains("labelling")) {
    const json& l = j["labelling"];
    if (l.is_string()) {
      if (l.get<std::string>() != "row-major") throw ConfigError("labelling", "expected \"row-major\" or a permutation");
    } else if (l.is_array()) {
      std::vector<int> perm;
      for (std::size_t k = 0; k < l.size(); ++k)
        perm.push_back(detail::int_at(l[k], "labelling[" + std::to_string(k) + "]", 1, c.lattice.depth));
      c.labelling = perm;
    } else {
      throw ConfigError("labelling", "expected \"row-major\" or a permutation");
    }
  }
  if (j.contains("unitaries")) {
    const json& u = j["unitaries"];
    if (u.is_array() && static_cast<int>(u.size()) != c.lattice.depth)
      throw ConfigError("unitaries", "need one entry per vertex (" + std::to_string(c.lattice.depth) + ")");
    if (!u.is_array() && !u.is_object()) throw ConfigError("unitaries", "expected an object or an array");
    c.unitaries = u;
  }
  if (j.contains("initial_state")) {
    if (!j["initial_state"].is_object()) throw ConfigError("initial_state", "expected an object");
    c.initial_state = j["initial_state"];
  }
  if (j.contains("coupling")) {
    const json& x = j["coupling"];
    c.couplings.clear();
    if (x.is_array()) {
      if (x.empty()) throw ConfigError("coupling", "grid must not be empty");
      for (std::size_t k = 0; k < x.size(); ++k)
        c.couplings.push_back(detail::coupling_at(x[k], "coupling[" + std::to_string(k) + "]"));
    } else {
      c.couplings.push_back(detail::coupling_at(x, "coupling"));
    }
  }
  if (j.contains("extent")) c.extent = detail::int_at(j["extent"], "extent", 0, c.lattice.depth);
  if (j.contains("tolerance")) {
    const double t = detail::number_at(j["tolerance"], "tolerance");
    if (!(t > 0.0)) throw ConfigError("tolerance", "must be positive");
    c.tolerance = t;
  }
  if (j.contains("functional")) {
    if (!j["functional"].is_string()) throw ConfigError("functional", "expected a string");
    c.functional = j["functional"].get<std::string>();
    if (c.functional != "q" && c.functional != "c" && c.functional != "qc" && c.functional != "qtilde" &&
        c.functional != "qe")
      throw ConfigError("functional", "must be one of q, c, qc, qtilde, qe");
  }
  if (j.contains("steps")) c.steps = detail::int_at(j["steps"], "steps", 0, c.lattice.depth);
  if (j.contains("count")) c.count = detail::uint_at(j["count"], "count");
  if (j.contains("seed")) c.seed = detail::uint_at(j["seed"], "seed");
  if (j.contains("trials")) c.trials = detail::int_at(j["trials"], "trials", 1, 100000);
  return c;
}

inline Model build_model(const RunConfig& c, double x) {
  Model m;
  m.geometry = LatticeGeometry(c.lattice);
  try {
    m.labelling = c.labelling ? m.geometry.validate_labelling(*c.labelling) : m.geometry.row_major();
  } catch (const LabellingError& e) {
    throw ConfigError("labelling", e.what());
  }
  const int depth = c.lattice.depth;
  for (int v = 0; v < depth; ++v) {
    if (c.unitaries.is_array())
      m.unitaries.push_back(detail::unitary_from(c.unitaries[v], "unitaries[" + std::to_string(v) + "]", v));
    else
      m.unitaries.push_back(detail::unitary_from(c.unitaries, "unitaries", v));
  }
  const json& init = c.initial_state;
  if (init.contains("mixture")) {
    const json& mix = init["mixture"];
    if (!mix.is_array() || mix.empty()) throw ConfigError("initial_state.mixture", "expected a non-empty array");
    double total = 0.0;
    for (std::size_t k = 0; k < mix.size(); ++k) {
      const std::string field = "initial_state.mixture[" + std::to_string(k) + "]";
      if (!mix[k].is_object() || !mix[k].contains("weight")) throw ConfigError(field, "expected {weight, basis|amplitudes}");
      const double w = detail::number_at(mix[k]["weight"], field + ".weight");
      if (w < 0.0) throw ConfigError(field + ".weight", "must be nonnegative");
      total += w;
      m.initial.push_back({w, detail::pure_state_from(mix[k], field, c.lattice.width)});
    }
    if (std::abs(total - 1.0) > kOperatorTolerance) throw ConfigError("initial_state.mixture", "weights must sum to 1");
  } else {
    m.initial.push_back({1.0, detail::pure_state_from(init, "initial_state", c.lattice.width)});
  }
  m.coupling = Coupling(x);
  m.validate();
  return m;
}

// Builds every model in the coupling grid, surfacing all config errors up front.
inline std::vector<Model> build_models(const RunConfig& c) {
  std::vector<Model> out;
  for (double x : c.couplings) out.push_back(build_model(c, x));
  return out;
}

}  // namespace nullcollapse
