#include <gtest/gtest.h>

#include "nullcollapse/io.hpp"
#include "test_support.hpp"

using namespace nullcollapse;
using nctest::make_model;
using nctest::Preset;
using nctest::rich_model;

TEST(Sampler, FullCouplingIsUniform) {
  const Model m = rich_model(2, 3, 1.0);
  for (int n = 0; n < 3; ++n)
    for (const auto& prefix : all_configs(n)) {
      const auto p = step_distribution(prefix, m);
      for (double v : p) EXPECT_NEAR(v, 0.25, 1e-12);
    }
}

TEST(Sampler, ZeroCouplingIdentityIsDeterministic) {
  const Model m = make_model(2, 4, Preset::identity, 0.0);
  const auto p = step_distribution(FieldConfig{}, m);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1] + p[2] + p[3], 0.0);
  const auto rec = sample_trajectory(m, 4, 123);
  EXPECT_EQ(rec.history.str(), "00000000");
  EXPECT_EQ(rec.chain_probability, 1.0);
  // a prefix that cannot happen has no conditional law
  EXPECT_THROW(step_distribution(FieldConfig::parse("11"), m), std::domain_error);
  EXPECT_THROW(conditioned_state(FieldConfig::parse("11"), m), std::domain_error);
}

TEST(Sampler, DistributionsAreNormalizedRatiosOfMeasures) {
  for (double x : {0.0, 0.3, 0.7}) {
    const Model m = rich_model(2, 3, x, 19);
    const ClassicalFunctional c(m);
    for (int n = 0; n < 3; ++n)
      for (const auto& prefix : all_configs(n)) {
        const double parent = c.measure(cylinder(prefix));
        double children = 0.0;
        for (int o = 0; o < 4; ++o) children += c.measure(cylinder(prefix.extended(o)));
        EXPECT_NEAR(children, parent, 1e-12);
        if (parent <= kZeroMeasure) continue;
        const auto p = step_distribution(prefix, m);
        EXPECT_NEAR(p[0] + p[1] + p[2] + p[3], 1.0, 1e-12);
        for (int o = 0; o < 4; ++o) EXPECT_NEAR(p[o], c.measure(cylinder(prefix.extended(o))) / parent, 1e-10);
      }
  }
}

TEST(Sampler, PrefixMustLeaveAVertex) {
  const Model m = rich_model(1, 2, 0.3);
  EXPECT_THROW(step_distribution(FieldConfig{0, 2}, m), std::out_of_range);
  EXPECT_THROW(sample_trajectory(m, 3, 1), std::out_of_range);
}

TEST(Sampler, ChainRuleHoldsPerTrajectory) {
  for (double x : {0.0, 0.3, 0.7, 1.0}) {
    Model m = rich_model(2, 3, x, 23);
    const ClassicalFunctional c(m);
    const auto records = sample_ensemble(m, 3, 300, 77);
    EXPECT_LT(check_chain_rule(c, records), 1e-10) << "X=" << x;
    for (const auto& r : records) {
      double prod = 1.0;
      for (double v : r.conditionals) prod *= v;
      EXPECT_EQ(prod, r.chain_probability);
      EXPECT_EQ(r.distributions.size(), 3u);
    }
  }
  // mixtures work too, without a final state
  Model mixed = rich_model(1, 3, 0.3);
  mixed.initial = {{0.5, StateVector::basis(2, 0)}, {0.5, StateVector::basis(2, 3)}};
  const auto records = sample_ensemble(mixed, 3, 100, 5);
  EXPECT_LT(check_chain_rule(ClassicalFunctional(mixed), records), 1e-10);
  EXPECT_EQ(records.front().final_state.dimension(), 0u);
}

TEST(Sampler, SeededOutputIsReproducible) {
  const Model m = rich_model(2, 3, 0.3);
  const auto a = trajectories_to_jsonl(sample_ensemble(m, 3, 50, 9));
  const auto b = trajectories_to_jsonl(sample_ensemble(m, 3, 50, 9));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, trajectories_to_jsonl(sample_ensemble(m, 3, 50, 10)));
  // each trajectory depends only on (seed, index)
  const auto ens = sample_ensemble(m, 3, 20, 9);
  const auto solo = sample_trajectory(m, 3, derive_seed(9, 17), 17);
  EXPECT_EQ(trajectory_to_json(ens[17]).dump(), trajectory_to_json(solo).dump());
}

// Loose sanity band; the strict three-sigma comparison lives in the
// acceptance run.
TEST(Sampler, FrequenciesTrackMeasure) {
  const Model m = rich_model(2, 2, 0.3);
  const ClassicalFunctional c(m);
  const std::uint64_t count = 20000;
  const auto records = sample_ensemble(m, 2, count, 314);
  std::vector<double> freq(16, 0.0);
  for (const auto& r : records) freq[r.history.bits] += 1.0 / count;
  for (std::uint64_t k = 0; k < 16; ++k) {
    const double mu = c.weights(2)[k];
    EXPECT_LT(std::abs(freq[k] - mu), 5.0 * std::sqrt(mu * (1 - mu) / count) + 1e-12) << k;
  }
}

TEST(ConditionedState, NormalizedKrausBranch) {
  const Model m = rich_model(2, 3, 0.3);
  for (const auto& prefix : all_configs(2)) {
    const auto s = conditioned_state(prefix, m);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    auto b = branch_c(prefix, m).state;
    b *= 1.0 / b.norm();
    EXPECT_LT(max_abs_difference(s, b), 1e-12);
  }
  const auto rec = sample_trajectory(m, 3, 4);
  EXPECT_LT(max_abs_difference(rec.final_state, conditioned_state(rec.history, m)), 1e-12);
}

TEST(ConditionedState, ZeroCouplingIsProjectedBranch) {
  const Model m = rich_model(2, 3, 0.0);
  for (const auto& prefix : all_configs(2)) {
    auto b = branch_q(prefix, m).state;
    if (b.norm_squared() <= kZeroMeasure) continue;
    b *= 1.0 / b.norm();
    EXPECT_LT(max_abs_difference(conditioned_state(prefix, m), b), 1e-12);
  }
}

TEST(ConditionedState, OutcomeZeroEnhancesFieldValueZero) {
  // |+>|+> with identity evolution: before the hit each link reads 0 with
  // probability 1/2; afterwards with 1/(1+X^2).
  const double h = 0.5;
  const SurfaceState plus = explicit_initial_state({h, h, h, h}, 1);
  const Model m = make_model(1, 2, Preset::identity, 0.3, 0, &plus);
  for (int other : {0, 1}) {
    const FieldConfig prefix{static_cast<std::uint64_t>(other << 1), 1};  // l_1 = 0
    const auto s = conditioned_state(prefix, m);
    const int slot = m.left_slot(1);
    double p0 = 0.0;
    for (std::size_t k = 0; k < s.dimension(); ++k)
      if (((k >> slot) & 1U) == 0) p0 += std::norm(s[k]);
    EXPECT_GT(p0, 0.5);
    EXPECT_NEAR(p0, 1.0 / 1.09, 1e-12);
  }
}

TEST(ConditionedState, MixtureIsRejected) {
  Model m = rich_model(1, 2, 0.3);
  m.initial = {{0.5, StateVector::basis(2, 0)}, {0.5, StateVector::basis(2, 1)}};
  EXPECT_THROW(conditioned_state(FieldConfig{}, m), std::invalid_argument);
}
