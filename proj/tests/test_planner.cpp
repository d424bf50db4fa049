#include "flambe/oracles.hpp"
#include "flambe/planner.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

namespace flambe {
namespace {

using testing::single_state_mdp;

// Rank-1 model with phi = [1]: the elliptical objective is policy
// independent and equal to Sigma_inv itself.
ModelEstimate scalar_feature_model(int n_states, int horizon) {
  Vec rho = Vec::Constant(n_states, 1.0 / n_states);
  std::vector<Vec> values(static_cast<std::size_t>(n_states), Vec::Ones(1));
  auto phi = AffinePhi::constant(1, values);
  std::vector<PhiPtr> phis(static_cast<std::size_t>(horizon), PhiPtr(phi));
  std::vector<Mat> psis(static_cast<std::size_t>(horizon),
                        Mat::Constant(n_states, 1, 1.0 / n_states));
  LowRankMDP mdp(1, 1, horizon, rho, phis, psis);
  return ModelEstimate{mdp, 0, {}, {}, {}};
}

ModelEstimate factory_model(std::uint64_t seed, int d = 2) {
  EnvConfig config;
  config.seed = seed;
  config.d = d;
  config.n_states = std::max(3, d);
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  return ModelEstimate{env, 0, {}, {}, {}};
}

TEST(Objective, SimplexFeaturesWithIdentityStayBelowOne) {
  ModelEstimate model = factory_model(7);
  PlannerConfig config;
  ObjectiveResult r = optimize_elliptical_objective(
      model, 1, Mat::Identity(2, 2), config, config.beta);
  EXPECT_GT(r.objective, 0.0);
  EXPECT_LE(r.objective, 1.0 + 1e-12);
}

TEST(Objective, ScalarFeatureObjectiveIsExactlyOne) {
  ModelEstimate model = scalar_feature_model(2, 3);
  PlannerConfig config;
  ObjectiveResult r = optimize_elliptical_objective(
      model, 2, Mat::Identity(1, 1), config, config.beta);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
}

TEST(Objective, SingleStateNoDynamicsMatchesGridScan) {
  EnvConfig config;
  config.n_states = 1;
  config.d = 1;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  ModelEstimate model{env, 0, {}, {}, {}};
  Mat sigma_inv = Mat::Constant(1, 1, 0.7);

  PlannerConfig pconfig;
  pconfig.grid_resolution = 64;
  ObjectiveResult r =
      optimize_elliptical_objective(model, 0, sigma_inv, pconfig, pconfig.beta);

  QuadratureGrid grid(1, 64);
  double best = 0.0;
  for (long c = 0; c < grid.n_cells(); ++c) {
    Vec f = env.phi(0)(0, grid.midpoint(c));
    best = std::max(best, 0.7 * f[0] * f[0]);
  }
  EXPECT_NEAR(r.objective, best, 1e-12);
}

TEST(Objective, MatchesForwardEnumerationOracle) {
  // Explicit nested enumeration over all (cell_0, cell_1) action choices,
  // written forward, against the backward DP.
  ModelEstimate model = factory_model(7);
  const LowRankMDP& mdp = model.model;
  Rng rng(41);
  Mat noise(2, 2);
  noise << 1.0, -0.2, -0.2, 1.4;
  Mat sigma_inv = noise * noise.transpose();
  sigma_inv = sigma_inv / sigma_inv.norm();

  const int g = 64;
  PlannerConfig config;
  config.grid_resolution = g;
  ObjectiveResult r =
      optimize_elliptical_objective(model, 1, sigma_inv, config, config.beta);

  QuadratureGrid grid(1, g);
  auto terminal = [&](int s, const Action& a) {
    Vec f = mdp.phi(1)(s, a);
    return f.dot(sigma_inv * f);
  };
  double expected = 0.0;
  for (int s0 = 0; s0 < mdp.n_states(); ++s0) {
    double best0 = -1.0;
    for (long c0 = 0; c0 < grid.n_cells(); ++c0) {
      Vec density = mdp.transition_density(0, s0, grid.midpoint(c0));
      double val = 0.0;
      for (int s1 = 0; s1 < mdp.n_states(); ++s1) {
        double best1 = -1.0;
        for (long c1 = 0; c1 < grid.n_cells(); ++c1) {
          best1 = std::max(best1, terminal(s1, grid.midpoint(c1)));
        }
        val += density[s1] * best1;
      }
      best0 = std::max(best0, val);
    }
    expected += mdp.rho()[s0] * best0;
  }
  EXPECT_NEAR(r.objective, expected, 1e-9);
}

TEST(Objective, RejectsAsymmetricSigmaInv) {
  ModelEstimate model = factory_model(7);
  Mat bad(2, 2);
  bad << 1.0, 0.5, 0.1, 1.0;
  PlannerConfig config;
  EXPECT_THROW(
      optimize_elliptical_objective(model, 1, bad, config, config.beta),
      DomainError);
}

TEST(Covariance, ScalarFeatureGivesOne) {
  ModelEstimate model = scalar_feature_model(2, 2);
  UniformRandomPolicy pi(1);
  Mat cov = expected_feature_covariance(model, pi, 1, QuadratureGrid(1, 16));
  ASSERT_EQ(cov.rows(), 1);
  EXPECT_NEAR(cov(0, 0), 1.0, 1e-12);
}

TEST(Covariance, ConstantFeatureGivesOuterProduct) {
  // Single state: psi . v = 1 keeps the density valid, ||psi|| <= sqrt(d).
  Vec v(2);
  v << 0.6, 0.8;
  Vec rho = Vec::Ones(1);
  auto phi = AffinePhi::constant(1, {v});
  Mat psi(1, 2);
  psi << 0.6, 0.8;
  LowRankMDP mdp(1, 2, 1, rho, {phi}, {psi});
  ModelEstimate model{mdp, 0, {}, {}, {}};
  UniformRandomPolicy pi(1);
  Mat cov = expected_feature_covariance(model, pi, 0, QuadratureGrid(1, 16));
  Mat expected = v * v.transpose();
  EXPECT_NEAR((cov - expected).norm(), 0.0, 1e-12);
}

TEST(Covariance, MatchesMonteCarloSecondMoment) {
  ModelEstimate model = factory_model(7);
  const LowRankMDP& mdp = model.model;
  UniformRandomPolicy pi(1);
  const int h_tilde = 1;
  Mat cov =
      expected_feature_covariance(model, pi, h_tilde, QuadratureGrid(1, 128));

  const int n = 100000;
  Mat mc = Mat::Zero(2, 2);
  Mat mc_sq = Mat::Zero(2, 2);
  Rng rng(909);
  for (int i = 0; i < n; ++i) {
    int s = rng.categorical(mdp.rho());
    Action a = rng.uniform_action(1);
    s = samp(mdp.phi(0), mdp.psi(0), s, a, rng);
    a = rng.uniform_action(1);
    Vec f = mdp.phi(h_tilde)(s, a);
    Mat outer = f * f.transpose();
    mc += outer;
    mc_sq += outer.cwiseProduct(outer);
  }
  mc /= static_cast<double>(n);
  mc_sq /= static_cast<double>(n);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      double var = std::max(1e-12, mc_sq(r, c) - mc(r, c) * mc(r, c));
      double se = std::sqrt(var / n);
      EXPECT_NEAR(mc(r, c), cov(r, c), 3.0 * se) << "entry " << r << c;
    }
  }
}

TEST(Plan, ImmediateHaltFallsBackToUniform) {
  ModelEstimate model = scalar_feature_model(2, 2);
  PlannerConfig config;
  config.beta = 4.0;  // objective 1 < beta/2 = 2 at t = 1
  PlannerResult plan = elliptical_plan(model, 1, config);
  EXPECT_TRUE(plan.degenerate_mixture);
  EXPECT_EQ(plan.iterations, 0);
  EXPECT_EQ(plan.policy->kind(), PolicyKind::UniformRandom);
}

TEST(Plan, ScalarPotentialClosedForm) {
  // Objectives 1, 1/2, 1/3, 1/4 all at or above beta/2 = 1/4; the halt
  // comes at t = 5 with objective 1/5, leaving a 4-component mixture.
  ModelEstimate model = scalar_feature_model(2, 2);
  PlannerConfig config;
  config.beta = 0.5;
  PlannerResult plan = elliptical_plan(model, 1, config);
  EXPECT_FALSE(plan.degenerate_mixture);
  EXPECT_EQ(plan.iterations, 4);
  ASSERT_EQ(plan.trace.size(), 5u);
  for (int t = 0; t < 5; ++t) {
    EXPECT_NEAR(plan.trace[static_cast<std::size_t>(t)].objective,
                1.0 / (t + 1), 1e-12);
  }
  const auto* mix =
      dynamic_cast<const FiniteMixturePolicy*>(plan.policy.get());
  ASSERT_NE(mix, nullptr);
  EXPECT_EQ(mix->n_components(), 4u);
}

TEST(Plan, IterationBoundAcrossFactoryModels) {
  const std::vector<double> betas = {0.25, 0.5, 1.0};
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const int d = 1 + static_cast<int>(seed % 3);
    ModelEstimate model = factory_model(seed, d);
    PlannerConfig config;
    config.beta = betas[static_cast<std::size_t>(seed) % betas.size()];
    config.grid_resolution = 16;
    PlannerResult plan = elliptical_plan(model, 1, config);
    EXPECT_LE(plan.iterations, planner_iteration_cap(d, config.beta))
        << "seed " << seed;
  }
}

TEST(Plan, LogDetMonotoneAndObjectiveShrinks) {
  ModelEstimate model = factory_model(11);
  PlannerConfig config;
  config.beta = 0.25;
  config.grid_resolution = 16;
  PlannerResult plan = elliptical_plan(model, 1, config);
  for (std::size_t i = 1; i < plan.trace.size(); ++i) {
    EXPECT_GE(plan.trace[i].log_det_sigma,
              plan.trace[i - 1].log_det_sigma - 1e-12);
  }

  // A fixed policy's objective never increases when evaluated against the
  // larger final Sigma.
  QuadratureGrid grid(1, 16);
  auto probe = GridMixturePolicy::uniform(2, model.model.n_states(), 1, 16);
  const int d = model.model.rank();
  Mat identity_inv = Mat::Identity(d, d);
  Mat final_inv =
      plan.sigma_final.llt().solve(Mat::Identity(d, d));
  double early = elliptical_objective_of_policy(model, 1, identity_inv, *probe, grid);
  double late = elliptical_objective_of_policy(
      model, 1, 0.5 * (final_inv + final_inv.transpose()), *probe, grid);
  EXPECT_LE(late, early + 1e-12);
}

TEST(Plan, RejectsBadBeta) {
  ModelEstimate model = scalar_feature_model(2, 2);
  PlannerConfig config;
  config.beta = 0.0;
  EXPECT_THROW(elliptical_plan(model, 1, config), DomainError);
  config.beta = 9.0;
  EXPECT_THROW(elliptical_plan(model, 1, config), DomainError);
}

TEST(Plan, ConcaveOptimizerFallsBackOnCosineEmbeddings) {
  ModelEstimate model = factory_model(7);
  PlannerConfig config;
  config.optimizer = InnerOptimizer::Concave;
  config.grid_resolution = 16;
  ObjectiveResult r = optimize_elliptical_objective(
      model, 1, Mat::Identity(2, 2), config, config.beta);
  EXPECT_TRUE(r.used_concave_fallback);
}

TEST(Plan, ConcaveOptimizerMatchesGridOnAffineEmbeddings) {
  // Affine simplex embeddings are concave; with nonnegative weights the
  // coordinate ascent should match (or beat) a fine grid search on the
  // linear backup step.
  LowRankMDP mdp = testing::two_state_mdp();
  ModelEstimate model{mdp, 0, {}, {}, {}};
  Mat sigma_inv = Mat::Identity(2, 2);

  PlannerConfig grid_config;
  grid_config.grid_resolution = 256;
  ObjectiveResult grid_r = optimize_elliptical_objective(
      model, 1, sigma_inv, grid_config, grid_config.beta);

  PlannerConfig concave_config;
  concave_config.optimizer = InnerOptimizer::Concave;
  concave_config.grid_resolution = 256;
  ObjectiveResult concave_r = optimize_elliptical_objective(
      model, 1, sigma_inv, concave_config, concave_config.beta);

  // The ascent reaches the exact linear-step maximum, the grid stops at a
  // midpoint; they agree up to one cell of slope.
  EXPECT_GE(concave_r.objective, grid_r.objective - 1e-9);
  EXPECT_NEAR(concave_r.objective, grid_r.objective, 0.02);
}

}  // namespace
}  // namespace flambe
