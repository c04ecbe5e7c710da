#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "nullcollapse/config.hpp"
#include "nullcollapse/environment.hpp"
#include "nullcollapse/functionals.hpp"
#include "nullcollapse/invariance.hpp"
#include "nullcollapse/io.hpp"
#include "nullcollapse/sampler.hpp"
#include "nullcollapse/verify.hpp"

namespace nullcollapse {

struct CheckOutcome {
  std::string name;
  double coupling = 0.0;
  int extent = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  bool passed() const { return max_deviation < tolerance; }
};

struct VerifyReport {
  std::vector<CheckOutcome> checks;
  nlohmann::json witnesses = nlohmann::json::array();

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
      arr.push_back({{"name", c.name},
                     {"coupling", c.coupling},
                     {"extent", c.extent},
                     {"max_deviation", c.max_deviation},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed()},
                     {"seconds", c.seconds}});
    return {{"passed", passed()}, {"checks", std::move(arr)}, {"interference_witnesses", witnesses}};
  }
};

// Joint tables grow as 16^n; environment checks stay at or below this extent.
inline constexpr int kMaxJointCheckExtent = 2;

// The witness search looks past the verification extent: on width 2 the first
// two vertices touch disjoint slots, so every extent-2 cylinder pair is
// orthogonal and interference only shows up from extent 3 on.
inline constexpr int kMaxWitnessExtent = 4;

inline VerifyReport run_verification(const RunConfig& config) {
  const auto models = build_models(config);
  VerifyReport report;
  const double lemma_tol = config.tolerance.value_or(1e-10);
  const double exact_tol = config.tolerance.value_or(1e-12);
  const int n = config.extent;
  const int joint_n = std::min(n, kMaxJointCheckExtent);

  for (const Model& model : models) {
    const double x = model.x();
    std::mt19937_64 rng(config.seed);
    auto timed = [&](const std::string& name, int extent, double tol, const std::function<double()>& f) {
      const auto t0 = std::chrono::steady_clock::now();
      const double dev = f();
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.checks.push_back({name, x, extent, dev, tol, secs});
    };

    auto q = std::make_shared<QuantumFunctional>(model);
    const ClassicalFunctional c(model);
    const CoupledFunctional qc(q);
    const DecoheredFunctional qtilde(q);
    const EnvironmentFunctional qe(model);

    const std::vector<std::pair<const DecoherenceFunctional*, int>> functionals = {
        {q.get(), n}, {&c, n}, {&qc, joint_n}, {&qtilde, n}, {&qe, joint_n}};
    for (const auto& [d, ext] : functionals) {
      AxiomDeviations dev;
      timed("axioms_" + d->name(), ext, lemma_tol, [&] {
        dev = check_axioms(*d, ext, model.depth(), rng, config.trials);
        return dev.worst();
      });
    }

    timed("quantum_coarse_graining_equals_collapse", n, lemma_tol, [&] { return check_quantum_coarse_graining(*q, c, n); });
    timed("classical_coarse_graining_closed_form", n, lemma_tol, [&] { return check_classical_coarse_graining(q, n); });
    timed("coupling_sum_identity", n, lemma_tol, [&] { return check_coupling_sum_identity(n, x); });
    timed("environment_equals_coupled", joint_n, lemma_tol,
          [&] { return check_environment_equivalence(qc, qe, joint_n); });
    timed("joint_branch_factorization", joint_n, exact_tol, [&] { return check_factorization(model, joint_n); });
    timed("collapse_level_one", n, lemma_tol, [&] { return check_level_one(c, n, rng, config.trials); });

    const Measure muq = [&](const Event& e) { return q->measure(e); };
    const Measure muc = [&](const Event& e) { return c.measure(e); };
    const Measure mut = [&](const Event& e) { return qtilde.measure(e); };
    timed("I2_mu_c_vanishes", n, lemma_tol, [&] { return check_interference_vanishes(2, muc, n, rng, config.trials); });
    timed("I3_mu_q_vanishes", n, lemma_tol, [&] { return check_interference_vanishes(3, muq, n, rng, config.trials); });
    timed("I3_mu_qtilde_vanishes", n, lemma_tol,
          [&] { return check_interference_vanishes(3, mut, n, rng, config.trials); });

    const auto w = find_interference_witness(*q, std::min(model.depth(), kMaxWitnessExtent));
    report.witnesses.push_back(
        {{"coupling", x}, {"extent", w.first.extent()}, {"first", to_text(w.first)}, {"second", to_text(w.second)}, {"I2_mu_q", w.value}});

    const NaturalLabelling alt = spacelike_transposition(model);
    if (!alt.order.empty()) {
      timed("labelling_independence", joint_n, exact_tol, [&] {
        auto single = all_cylinder_pairs(joint_n, 1);
        const auto joint = all_cylinder_pairs(joint_n, 2);
        single.insert(single.end(), joint.begin(), joint.end());
        return labelling_invariance_check(model, alt, single).worst();
      });
    }

    const int steps = std::min(config.steps, model.depth());
    timed("sampler_chain_rule", steps, lemma_tol, [&] {
      const auto records = sample_ensemble(model, steps, 200, config.seed);
      double dev = check_chain_rule(c, records);
      const auto again = sample_ensemble(model, steps, 200, config.seed);
      if (trajectories_to_jsonl(records) != trajectories_to_jsonl(again)) dev = std::max(dev, 1.0);
      return dev;
    });
  }
  return report;
}

// Returns the process exit code: 0 iff every check passed.
inline int cmd_verify(const RunConfig& config, const std::optional<std::filesystem::path>& out, std::ostream& os) {
  const VerifyReport report = run_verification(config);
  const std::string text = report.to_json().dump(2) + "\n";
  os << text;
  if (out) write_file_atomic(*out / "verify_report.json", text);
  return report.passed() ? 0 : 1;
}

inline std::unique_ptr<DecoherenceFunctional> make_functional(const std::string& name, const Model& model) {
  if (name == "q") return std::make_unique<QuantumFunctional>(model);
  if (name == "c") return std::make_unique<ClassicalFunctional>(model);
  if (name == "qc") return std::make_unique<CoupledFunctional>(model);
  if (name == "qtilde") return std::make_unique<DecoheredFunctional>(model);
  if (name == "qe") return std::make_unique<EnvironmentFunctional>(model);
  throw ConfigError("functional", "must be one of q, c, qc, qtilde, qe");
}

// Writes table_<functional>_n<extent>.{csv,json}; returns the two paths.
inline std::vector<std::filesystem::path> cmd_table(const RunConfig& config, const std::filesystem::path& out) {
  const Model model = build_model(config, config.couplings.front());
  const auto d = make_functional(config.functional, model);
  const DecoherenceTable table = make_table(*d, config.extent);
  const double tol = config.tolerance.value_or(1e-10);
  if (table.hermiticity_defect() > tol)
    throw std::runtime_error("table is not Hermitian (defect " + format_double(table.hermiticity_defect()) + ")");
  if (std::abs(table.total() - 1.0) > tol)
    throw std::runtime_error("table does not sum to 1 (sum " + format_double(table.total().real()) + ")");
  const std::string stem = "table_" + config.functional + "_n" + std::to_string(config.extent);
  const auto csv = out / (stem + ".csv");
  const auto js = out / (stem + ".json");
  write_file_atomic(csv, table_to_csv(table));
  write_file_atomic(js, table_to_json(table).dump() + "\n");
  return {csv, js};
}

// Writes trajectories.jsonl and frequencies.csv.
inline std::vector<std::filesystem::path> cmd_sample(const RunConfig& config, const std::filesystem::path& out) {
  const Model model = build_model(config, config.couplings.front());
  const auto records = sample_ensemble(model, config.steps, config.count, config.seed);
  const ClassicalFunctional c(model);
  const auto traj = out / "trajectories.jsonl";
  const auto freq = out / "frequencies.csv";
  write_file_atomic(traj, trajectories_to_jsonl(records));
  write_file_atomic(freq, frequency_summary_csv(records, c, config.steps));
  return {traj, freq};
}

}  // namespace nullcollapse
