#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullcollapse/events.hpp"
#include "nullcollapse/hilbert.hpp"
#include "nullcollapse/model.hpp"

namespace nullcollapse {

struct BranchAmplitude {
  FieldConfig config;
  SurfaceState state;
};

enum class ChainKind { projector, kraus };

// |Phi^n> = P P R_n ... P_2 P_1 R_1 psi0  (projector chain)
// |alpha^n> = J J R_n ... J_2 J_1 R_1 psi0  (Kraus chain)
inline SurfaceState run_chain(const FieldConfig& config, const Model& model, const SurfaceState& psi0, ChainKind kind) {
  model.check_extent(config.extent);
  SurfaceState s = psi0;
  for (int i = 1; i <= config.extent; ++i) {
    model.evolve(s, i);
    if (kind == ChainKind::projector) model.project_step(s, i, config.vertex_outcome(i));
    else model.kraus_step(s, i, config.vertex_outcome(i));
  }
  return s;
}

inline BranchAmplitude branch_q(const FieldConfig& config, const Model& model, int component = 0) {
  return {config, run_chain(config, model, model.initial.at(component).state, ChainKind::projector)};
}

inline BranchAmplitude branch_c(const FieldConfig& config, const Model& model, int component = 0) {
  return {config, run_chain(config, model, model.initial.at(component).state, ChainKind::kraus)};
}

// All 4^n branches, indexed by config bits, grown as a tree of prefixes.
inline std::vector<SurfaceState> all_branches(const Model& model, int n, const SurfaceState& psi0, ChainKind kind) {
  model.check_extent(n);
  std::vector<SurfaceState> level{psi0};
  for (int i = 1; i <= n; ++i) {
    std::vector<SurfaceState> next(level.size() * 4);
    for (std::size_t k = 0; k < level.size(); ++k) {
      SurfaceState evolved = level[k];
      model.evolve(evolved, i);
      for (int o = 0; o < 4; ++o) {
        SurfaceState child = evolved;
        if (kind == ChainKind::projector) model.project_step(child, i, o);
        else model.kraus_step(child, i, o);
        next[k | (static_cast<std::size_t>(o) << (2 * (i - 1)))] = std::move(child);
      }
    }
    level = std::move(next);
  }
  return level;
}

// X^d with 0^0 = 1.
inline double coupling_power(double x, int d) { return d == 0 ? 1.0 : std::pow(x, d); }

// (2X / (1+X^2))^d, the off-diagonal suppression of the classically
// coarse-grained functional.
inline double suppression_factor(double x, int d) { return coupling_power(2.0 * x / (1.0 + x * x), d); }

// ---------------------------------------------------------------------------

class DecoherenceFunctional {
 public:
  virtual ~DecoherenceFunctional() = default;

  virtual std::string name() const = 0;
  virtual int factors() const = 0;

  // D(A; B) by additivity after refining both to their common extent.
  virtual cplx operator()(const Event& a, const Event& b) const = 0;

  // D on a pair of cylinders given by their keys at extent n.
  virtual cplx cylinder(std::uint64_t a, std::uint64_t b, int n) const = 0;

  double measure(const Event& a) const { return (*this)(a, a).real(); }

 protected:
  std::pair<Event, Event> align(const Event& a, const Event& b, int depth) const {
    a.require_factors(factors());
    b.require_factors(factors());
    const int m = std::max(a.extent(), b.extent());
    if (m > depth)
      throw std::out_of_range("event extent " + std::to_string(m) + " exceeds lattice depth " + std::to_string(depth));
    return {refine(a, m), refine(b, m)};
  }
};

// Lazily computed per-extent tables, shareable across threads.
template <typename T>
class ExtentCache {
 public:
  template <typename F>
  const T& get(int n, F&& make) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(n);
    if (it == cache_.end()) it = cache_.emplace(n, std::make_shared<const T>(make(n))).first;
    return *it->second;
  }

 private:
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const T>> cache_;
};

namespace detail {
inline SurfaceState sum_over(const std::vector<SurfaceState>& branches, const Event& e, int qubits) {
  SurfaceState s(qubits);
  for (auto k : e.keys()) s += branches[k];
  return s;
}
}  // namespace detail

// Unitary functional: D_q(Cyl(Phi); Cyl(Phi')) = <Phi|Phi'>.
class QuantumFunctional : public DecoherenceFunctional {
 public:
  explicit QuantumFunctional(Model model) : model_(std::move(model)) { model_.validate(); }

  std::string name() const override { return "q"; }
  int factors() const override { return 1; }
  const Model& model() const { return model_; }

  cplx operator()(const Event& a, const Event& b) const override {
    auto [ra, rb] = align(a, b, model_.depth());
    const auto& tables = branches(ra.extent());
    cplx total{};
    for (std::size_t c = 0; c < tables.size(); ++c) {
      const SurfaceState sa = detail::sum_over(tables[c], ra, model_.slots());
      const SurfaceState sb = detail::sum_over(tables[c], rb, model_.slots());
      total += model_.initial[c].weight * inner_product(sa, sb);
    }
    return total;
  }

  cplx cylinder(std::uint64_t a, std::uint64_t b, int n) const override { return gram(n)[a * (std::uint64_t{1} << (2 * n)) + b]; }

  // Per mixture component, branch amplitudes at extent n.
  const std::vector<std::vector<SurfaceState>>& branches(int n) const {
    model_.check_extent(n);
    return branches_.get(n, [this](int m) {
      std::vector<std::vector<SurfaceState>> out;
      for (const auto& comp : model_.initial) out.push_back(all_branches(model_, m, comp.state, ChainKind::projector));
      return out;
    });
  }

  // Dense matrix of cylinder values at extent n, row-major over config bits.
  const std::vector<cplx>& gram(int n) const {
    model_.check_extent(n);
    return gram_.get(n, [this](int m) {
      const auto& tables = branches(m);
      const std::size_t dim = std::size_t{1} << (2 * m);
      std::vector<cplx> g(dim * dim);
      for (std::size_t c = 0; c < tables.size(); ++c)
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = 0; j < dim; ++j)
            g[i * dim + j] += model_.initial[c].weight * inner_product(tables[c][i], tables[c][j]);
      return g;
    });
  }

 private:
  Model model_;
  ExtentCache<std::vector<std::vector<SurfaceState>>> branches_;
  ExtentCache<std::vector<cplx>> gram_;
};

// Collapse-model functional: D_c(Cyl(a); Cyl(a')) = <a|a'> delta_{a a'} over Kraus chains.
class ClassicalFunctional : public DecoherenceFunctional {
 public:
  explicit ClassicalFunctional(Model model) : model_(std::move(model)) { model_.validate(); }

  std::string name() const override { return "c"; }
  int factors() const override { return 1; }
  const Model& model() const { return model_; }

  cplx operator()(const Event& a, const Event& b) const override {
    auto [ra, rb] = align(a, b, model_.depth());
    const auto& w = weights(ra.extent());
    double total = 0.0;
    std::size_t i = 0, j = 0;
    const auto& ka = ra.keys();
    const auto& kb = rb.keys();
    while (i < ka.size() && j < kb.size()) {
      if (ka[i] < kb[j]) ++i;
      else if (kb[j] < ka[i]) ++j;
      else {
        total += w[ka[i]];
        ++i;
        ++j;
      }
    }
    return total;
  }

  cplx cylinder(std::uint64_t a, std::uint64_t b, int n) const override { return a == b ? weights(n)[a] : 0.0; }

  const std::vector<std::vector<SurfaceState>>& branches(int n) const {
    model_.check_extent(n);
    return branches_.get(n, [this](int m) {
      std::vector<std::vector<SurfaceState>> out;
      for (const auto& comp : model_.initial) out.push_back(all_branches(model_, m, comp.state, ChainKind::kraus));
      return out;
    });
  }

  // mu_c of every cylinder at extent n.
  const std::vector<double>& weights(int n) const {
    return weights_.get(n, [this](int m) {
      const auto& tables = branches(m);
      std::vector<double> w(std::size_t{1} << (2 * m), 0.0);
      for (std::size_t c = 0; c < tables.size(); ++c)
        for (std::size_t k = 0; k < w.size(); ++k) w[k] += model_.initial[c].weight * tables[c][k].norm_squared();
      return w;
    });
  }

 private:
  Model model_;
  ExtentCache<std::vector<std::vector<SurfaceState>>> branches_;
  ExtentCache<std::vector<double>> weights_;
};

// Cylinder value of the coupled quantum-classical functional:
// D_q(Phi; Phi') X^{d(Phi,a) + d(Phi',a')} / (1+X^2)^{2n} delta_{a a'}.
inline cplx coupled_cylinder(cplx dq, const FieldConfig& phi, const FieldConfig& alpha, const FieldConfig& phi_bar,
                             const FieldConfig& alpha_bar, double x) {
  if (alpha != alpha_bar) return 0.0;
  const int n = phi.extent;
  return dq * coupling_power(x, hamming(phi, alpha) + hamming(phi_bar, alpha_bar)) / std::pow(1.0 + x * x, 2 * n);
}

class CoupledFunctional : public DecoherenceFunctional {
 public:
  explicit CoupledFunctional(std::shared_ptr<const QuantumFunctional> q) : q_(std::move(q)) {}
  explicit CoupledFunctional(Model model) : q_(std::make_shared<QuantumFunctional>(std::move(model))) {}

  std::string name() const override { return "qc"; }
  int factors() const override { return 2; }

  // Sum over classical configs of <v_A(a)|v_B(a)> with
  // v_E(a) = sum_{(Phi,a) in E} X^{d(Phi,a)} / (1+X^2)^n |Phi>.
  cplx operator()(const Event& a, const Event& b) const override {
    const Model& model = q_->model();
    auto [ra, rb] = align(a, b, model.depth());
    const int n = ra.extent();
    const double x = model.x();
    const double norm = 1.0 / std::pow(1.0 + x * x, n);
    const auto& tables = q_->branches(n);
    cplx total{};
    for (std::size_t c = 0; c < tables.size(); ++c) {
      auto collect = [&](const Event& e) {
        std::map<std::uint64_t, SurfaceState> v;
        for (auto key : e.keys()) {
          const FieldConfig phi = e.part(key, 0);
          const FieldConfig alpha = e.part(key, 1);
          auto [it, fresh] = v.try_emplace(alpha.bits, model.slots());
          SurfaceState term = tables[c][phi.bits];
          term *= coupling_power(x, hamming(phi, alpha)) * norm;
          it->second += term;
        }
        return v;
      };
      const auto va = collect(ra);
      const auto vb = collect(rb);
      for (const auto& [alpha, sa] : va) {
        auto it = vb.find(alpha);
        if (it != vb.end()) total += model.initial[c].weight * inner_product(sa, it->second);
      }
    }
    return total;
  }

  cplx cylinder(std::uint64_t a, std::uint64_t b, int n) const override {
    const FieldConfig phi = Event::unpack(a, 0, n), alpha = Event::unpack(a, 1, n);
    const FieldConfig phi_bar = Event::unpack(b, 0, n), alpha_bar = Event::unpack(b, 1, n);
    return coupled_cylinder(q_->cylinder(phi.bits, phi_bar.bits, n), phi, alpha, phi_bar, alpha_bar, q_->model().x());
  }

  const QuantumFunctional& quantum() const { return *q_; }

 private:
  std::shared_ptr<const QuantumFunctional> q_;
};

// Classically coarse-grained functional in closed form:
// D~_q(Phi; Phi') = (2X/(1+X^2))^{d(Phi,Phi')} D_q(Phi; Phi').
class DecoheredFunctional : public DecoherenceFunctional {
 public:
  explicit DecoheredFunctional(std::shared_ptr<const QuantumFunctional> q) : q_(std::move(q)) {}
  explicit DecoheredFunctional(Model model) : q_(std::make_shared<QuantumFunctional>(std::move(model))) {}

  std::string name() const override { return "qtilde"; }
  int factors() const override { return 1; }

  cplx operator()(const Event& a, const Event& b) const override {
    auto [ra, rb] = align(a, b, q_->model().depth());
    const int n = ra.extent();
    cplx total{};
    for (auto ka : ra.keys())
      for (auto kb : rb.keys()) total += cylinder(ka, kb, n);
    return total;
  }

  cplx cylinder(std::uint64_t a, std::uint64_t b, int n) const override {
    return suppression_factor(q_->model().x(), __builtin_popcountll(a ^ b)) * q_->cylinder(a, b, n);
  }

 private:
  std::shared_ptr<const QuantumFunctional> q_;
};

// ---------------------------------------------------------------------------
// Coarse grainings of the coupled functional, by explicit summation of its
// cylinder values. These are the opposite sides of the two coarse-graining
// identities and share no code path with ClassicalFunctional or the closed form.

// D_qc(Omega_q x A; Omega_q x B) for classical events A, B.
inline cplx coarse_grain_quantum(const Event& a, const Event& b, const QuantumFunctional& q) {
  a.require_factors(1);
  b.require_factors(1);
  const int n = std::max(a.extent(), b.extent());
  q.model().check_extent(n);
  const Event ra = refine(a, n), rb = refine(b, n);
  const double x = q.model().x();
  const auto configs = all_configs(n);
  cplx total{};
  for (auto ka : ra.keys()) {
    for (auto kb : rb.keys()) {
      const FieldConfig alpha{ka, n}, alpha_bar{kb, n};
      if (alpha != alpha_bar) continue;  // every term carries delta_{a a'}
      for (const auto& phi : configs)
        for (const auto& phi_bar : configs)
          total += coupled_cylinder(q.cylinder(phi.bits, phi_bar.bits, n), phi, alpha, phi_bar, alpha_bar, x);
    }
  }
  return total;
}

// D_qc(F x Omega_c; G x Omega_c) for quantum events F, G.
inline cplx coarse_grain_classical(const Event& f, const Event& g, const QuantumFunctional& q) {
  f.require_factors(1);
  g.require_factors(1);
  const int n = std::max(f.extent(), g.extent());
  q.model().check_extent(n);
  const Event rf = refine(f, n), rg = refine(g, n);
  const double x = q.model().x();
  const auto configs = all_configs(n);
  cplx total{};
  for (auto kf : rf.keys())
    for (auto kg : rg.keys()) {
      const FieldConfig phi{kf, n}, phi_bar{kg, n};
      const cplx dq = q.cylinder(kf, kg, n);
      for (const auto& alpha : configs)
        for (const auto& alpha_bar : configs) total += coupled_cylinder(dq, phi, alpha, phi_bar, alpha_bar, x);
    }
  return total;
}

inline cplx dtilde_closed_form(const Event& f, const Event& g, std::shared_ptr<const QuantumFunctional> q) {
  return DecoheredFunctional(std::move(q))(f, g);
}

// Sum over all alpha^n of X^{d(Phi,alpha) + d(Phi',alpha)}, enumerated.
inline double coupling_sum_enumerated(const FieldConfig& phi, const FieldConfig& phi_bar, double x) {
  double s = 0.0;
  for (const auto& alpha : all_configs(phi.extent)) s += coupling_power(x, hamming(phi, alpha) + hamming(phi_bar, alpha));
  return s;
}

// 2^m X^m (1+X^2)^{2n-m} with m = d(Phi, Phi').
inline double coupling_sum_closed_form(int n, int m, double x) {
  return std::pow(2.0, m) * coupling_power(x, m) * std::pow(1.0 + x * x, 2 * n - m);
}

// ---------------------------------------------------------------------------
// Convenience entry points that build the functional from a model.

inline cplx d_q(const Event& a, const Event& b, const Model& m) { return QuantumFunctional(m)(a, b); }
inline cplx d_c(const Event& a, const Event& b, const Model& m) { return ClassicalFunctional(m)(a, b); }
inline double mu_q(const Event& a, const Model& m) { return QuantumFunctional(m).measure(a); }
inline double mu_c(const Event& a, const Model& m) { return ClassicalFunctional(m).measure(a); }
inline cplx d_qc(const Event& a, const Event& b, const Model& m) { return CoupledFunctional(m)(a, b); }
inline cplx coarse_grain_quantum(const Event& a, const Event& b, const Model& m) {
  return coarse_grain_quantum(a, b, QuantumFunctional(m));
}
inline cplx coarse_grain_classical(const Event& f, const Event& g, const Model& m) {
  return coarse_grain_classical(f, g, QuantumFunctional(m));
}
inline cplx dtilde_closed_form(const Event& f, const Event& g, const Model& m) {
  return DecoheredFunctional(m)(f, g);
}

// ---------------------------------------------------------------------------
// Interference terms

using Measure = std::function<double(const Event&)>;

// I_k(X_1..X_k) = sum over nonempty S of (-1)^{k-|S|} mu(union of S).
inline double interference(int k, std::span<const Event> events, const Measure& mu) {
  if (k < 1 || k > 3) throw std::invalid_argument("interference terms are provided for k = 1, 2, 3");
  if (static_cast<int>(events.size()) != k)
    throw std::invalid_argument("I_" + std::to_string(k) + " needs exactly " + std::to_string(k) + " events");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (!disjoint(events[i], events[j]))
        throw std::invalid_argument("interference arguments " + std::to_string(i + 1) + " and " +
                                    std::to_string(j + 1) + " are not disjoint");
  double total = 0.0;
  for (unsigned mask = 1; mask < (1U << k); ++mask) {
    Event u = Event::empty(events[0].factors());
    int size = 0;
    for (int i = 0; i < k; ++i)
      if (mask & (1U << i)) {
        u = union_of(u, events[i]);
        ++size;
      }
    total += ((k - size) % 2 == 0 ? 1.0 : -1.0) * mu(u);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Tables over all cylinder pairs at one extent

struct DecoherenceTable {
  std::string functional;
  int extent = 0;
  int factors = 1;
  std::vector<std::string> labels;
  std::vector<cplx> entries;  // row-major

  std::size_t dimension() const { return labels.size(); }
  cplx at(std::size_t r, std::size_t c) const { return entries[r * dimension() + c]; }

  double hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t r = 0; r < dimension(); ++r)
      for (std::size_t c = r; c < dimension(); ++c) m = std::max(m, std::abs(at(r, c) - std::conj(at(c, r))));
    return m;
  }
  cplx total() const {
    cplx s{};
    for (const auto& e : entries) s += e;
    return s;
  }
  double min_diagonal() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < dimension(); ++r) m = std::min(m, at(r, r).real());
    return m;
  }
  bool diagonal_only() const {
    for (std::size_t r = 0; r < dimension(); ++r)
      for (std::size_t c = 0; c < dimension(); ++c)
        if (r != c && at(r, c) != cplx{}) return false;
    return true;
  }
};

inline std::string cylinder_label(std::uint64_t key, int n, int factors) {
  std::string s = Event::unpack(key, 0, n).str();
  if (factors == 2) s += "|" + Event::unpack(key, 1, n).str();
  if (n == 0) s = factors == 2 ? "-|-" : "-";
  return s;
}

inline DecoherenceTable make_table(const DecoherenceFunctional& d, int n) {
  DecoherenceTable t;
  t.functional = d.name();
  t.extent = n;
  t.factors = d.factors();
  const std::uint64_t dim = std::uint64_t{1} << (2 * n * d.factors());
  if (dim > (std::uint64_t{1} << 10)) throw std::length_error("table dimension " + std::to_string(dim) + " exceeds 1024 rows");
  t.labels.reserve(dim);
  for (std::uint64_t k = 0; k < dim; ++k) t.labels.push_back(cylinder_label(k, n, d.factors()));
  t.entries.resize(dim * dim);
  for (std::uint64_t r = 0; r < dim; ++r)
    for (std::uint64_t c = 0; c < dim; ++c) t.entries[r * dim + c] = d.cylinder(r, c, n);
  return t;
}

}  // namespace nullcollapse
