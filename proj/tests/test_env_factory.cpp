#include "flambe/env_factory.hpp"
#include "flambe/verifiers.hpp"

#include <gtest/gtest.h>

namespace flambe {
namespace {

TEST(EnvFactory, ZeroBandwidthGivesActionIndependentEmbedding) {
  EnvConfig config;
  config.l_target = 0.0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  Vec a0 = env.phi(0)(1, Action::Constant(1, 0.0));
  Vec a1 = env.phi(0)(1, Action::Constant(1, 1.0));
  EXPECT_NEAR((a0 - a1).norm(), 0.0, 1e-14);

  QuadratureGrid grid(1, 64);
  double l = holder_quotient_estimate_vec(
      grid, [&](const Action& a) { return env.phi(0)(0, a); }, 1.0);
  EXPECT_NEAR(l, 0.0, 1e-14);
}

TEST(EnvFactory, RankOneMakesTransitionsActionIndependent) {
  EnvConfig config;
  config.d = 1;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  Vec p0 = env.transition_density(0, 0, Action::Constant(1, 0.1));
  Vec p1 = env.transition_density(0, 0, Action::Constant(1, 0.9));
  Vec p2 = env.transition_density(0, 2, Action::Constant(1, 0.4));
  EXPECT_NEAR((p0 - p1).norm(), 0.0, 1e-14);
  EXPECT_NEAR((p0 - p2).norm(), 0.0, 1e-14);
}

TEST(EnvFactory, HolderConstantScaledToTarget) {
  EnvConfig config;  // alpha = 1, l_target = 2, seed = 7
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  QuadratureGrid grid(1, 256);
  double worst = 0.0;
  for (int s = 0; s < env.n_states(); ++s) {
    worst = std::max(
        worst, holder_quotient_estimate_vec(
                   grid, [&](const Action& a) { return env.phi(0)(s, a); },
                   config.alpha));
  }
  EXPECT_LE(worst, config.l_target * (1.0 + 1e-3));
}

TEST(EnvFactory, RegenerationIsBitIdentical) {
  EnvConfig config;
  config.seed = 1234;
  LowRankMDP a = make_smooth_lowrank_mdp(config);
  LowRankMDP b = make_smooth_lowrank_mdp(config);
  EXPECT_EQ(a.rho(), b.rho());
  for (int h = 0; h < a.horizon(); ++h) {
    EXPECT_EQ(a.psi(h), b.psi(h));
    Action probe = Action::Constant(1, 0.37);
    EXPECT_EQ(a.phi(h)(0, probe), b.phi(h)(0, probe));
  }
}

TEST(EnvFactory, PerStepTruthGivesDistinctSteps) {
  EnvConfig config;
  config.per_step_truth = true;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  EXPECT_NE(env.phi_ptr(0).get(), env.phi_ptr(1).get());
  EXPECT_NE(env.psi(0), env.psi(1));
}

TEST(HypothesisClass, ZeroDecoysIsJustTruth) {
  EnvConfig config;
  config.n_phi_decoys = 0;
  config.n_psi_decoys = 0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  EXPECT_EQ(cls.n_phi(), 1u);
  EXPECT_EQ(cls.n_psi(), 1u);
  EXPECT_EQ(cls.true_phi_index(0), 0);
  EXPECT_EQ(cls.min_tv_separation(), 0.0);
}

TEST(HypothesisClass, ZeroPerturbationScaleIsRejected) {
  EnvConfig config;
  config.decoy_scale = 0.0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  EXPECT_THROW(make_hypothesis_class(env, config), NumericalError);
}

TEST(HypothesisClass, FactoryClassHasSeparatedDecoys) {
  EnvConfig config;  // seed 7, 4+4 decoys, scale 0.3
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  EXPECT_EQ(cls.n_phi(), 5u);
  EXPECT_EQ(cls.n_psi(), 5u);
  EXPECT_GT(cls.min_tv_separation(), 0.01);
}

TEST(HypothesisClass, SeparationFloorIsEnforced) {
  EnvConfig config;
  config.decoy_min_tv_sep = 0.05;
  config.decoy_scale = 0.5;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  EXPECT_GE(cls.min_tv_separation(), 0.05);
}

TEST(Certificate, TruthOnlyClassHasZeroErrorFunctional) {
  EnvConfig config;
  config.n_phi_decoys = 0;
  config.n_psi_decoys = 0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  SmoothnessProfile profile = smoothness_certificate(cls, env, 64);
  EXPECT_NEAR(profile.l_e, 0.0, 1e-12);
  EXPECT_GT(profile.l_phi, 0.0);
  EXPECT_GT(profile.l_t, 0.0);
}

TEST(Certificate, ConstantEmbeddingsHaveZeroConstants) {
  EnvConfig config;
  config.l_target = 0.0;
  config.n_phi_decoys = 0;
  config.n_psi_decoys = 0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  SmoothnessProfile profile = smoothness_certificate(cls, env, 64);
  EXPECT_NEAR(profile.l_phi, 0.0, 1e-14);
  EXPECT_NEAR(profile.l_t, 0.0, 1e-14);
  EXPECT_NEAR(profile.l_e, 0.0, 1e-14);
}

TEST(Certificate, ErrorSmoothnessBoundHoldsOnFactoryClass) {
  EnvConfig config;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  SmoothnessProfile profile = smoothness_certificate(cls, env, 64);
  EXPECT_LE(profile.l_e, 2.0 * env.rank() * profile.l_phi + 1e-9);
  EXPECT_GT(profile.l_e, 0.0);
  // Hellinger diagnostic is populated alongside.
  EXPECT_GT(profile.l_e_hellinger, 0.0);
}

TEST(Certificate, SuiteHoldsAcrossSeeds) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 5; ++s) seeds.push_back(s);
  CertificateSuite suite = run_certificate_suite(seeds, 32);
  EXPECT_TRUE(suite.all_hold);
  EXPECT_EQ(suite.rows.size(), 5u);
}

}  // namespace
}  // namespace flambe
