#include "flambe/distance.hpp"
#include "flambe/oracles.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace flambe {
namespace {

TransitionDataset collect_uniform(const LowRankMDP& env, int h, long n,
                                  std::uint64_t seed) {
  TransitionDataset data(h, env.n_states(), env.action_dim());
  UniformRandomPolicy uniform(env.action_dim());
  for (long i = 0; i < n; ++i) {
    Rng rng = Rng::derived(seed, {static_cast<std::uint64_t>(h),
                                  static_cast<std::uint64_t>(i)});
    int s = rng.categorical(env.rho());
    for (int t = 0; t < h; ++t) {
      Action a = rng.uniform_action(env.action_dim());
      s = rng.categorical(env.transition_density(t, s, a));
    }
    Action a = rng.uniform_action(env.action_dim());
    int s_next = rng.categorical(env.transition_density(h, s, a));
    data.append(TransitionSample{s, a, s_next, 0, seed});
  }
  return data;
}

TEST(MleFit, TruthOnlyClassReturnsTruth) {
  EnvConfig config;
  config.n_phi_decoys = 0;
  config.n_psi_decoys = 0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  TransitionDataset data = collect_uniform(env, 0, 50, 1);
  MleResult fit = mle_fit(data, cls);
  EXPECT_EQ(fit.phi_index, 0);
  EXPECT_EQ(fit.psi_index, 0);
}

TEST(MleFit, ZeroProbabilityDecoyIsDominated) {
  // Two states; truth spreads mass evenly, decoy puts zero mass on state 1.
  Vec rho(2);
  rho << 1.0, 0.0;
  Vec e0(1);
  e0 << 1.0;
  auto phi = AffinePhi::constant(1, {e0, e0});
  Mat psi_true(2, 1);
  psi_true << 0.5, 0.5;
  Mat psi_decoy(2, 1);
  psi_decoy << 1.0, 0.0;
  HypothesisClass cls({phi}, {psi_true, psi_decoy}, {0}, {0}, 1.0);

  TransitionDataset data(0, 2, 1);
  // One observed transition into state 1 kills the decoy.
  data.append(TransitionSample{0, Action::Constant(1, 0.5), 1, 0, 0});
  data.append(TransitionSample{0, Action::Constant(1, 0.25), 0, 0, 0});
  MleResult fit = mle_fit(data, cls);
  EXPECT_EQ(fit.psi_index, 0);
}

TEST(MleFit, DeterministicAndPermutationInvariant) {
  EnvConfig config;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  TransitionDataset data = collect_uniform(env, 1, 300, 5);

  MleResult a = mle_fit(data, cls);
  MleResult b = mle_fit(data, cls);
  EXPECT_EQ(a.phi_index, b.phi_index);
  EXPECT_EQ(a.psi_index, b.psi_index);
  EXPECT_DOUBLE_EQ(a.log_likelihood, b.log_likelihood);

  // Reversed sample order: same argmax, same likelihood within rounding.
  TransitionDataset reversed(1, env.n_states(), env.action_dim());
  auto samples = data.samples();
  std::reverse(samples.begin(), samples.end());
  for (const auto& sample : samples) reversed.append(sample);
  MleResult c = mle_fit(reversed, cls);
  EXPECT_EQ(a.phi_index, c.phi_index);
  EXPECT_EQ(a.psi_index, c.psi_index);
  EXPECT_NEAR(a.log_likelihood, c.log_likelihood, 1e-8);
}

TEST(MleFit, EmptyDatasetRejected) {
  EnvConfig config;
  config.n_phi_decoys = 0;
  config.n_psi_decoys = 0;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  HypothesisClass cls = make_hypothesis_class(env, config);
  TransitionDataset data(0, env.n_states(), env.action_dim());
  EXPECT_THROW(mle_fit(data, cls), DomainError);
}

TEST(MleFit, ConsistentOnSeparatedClasses) {
  // Small version of the consistency study: 2000 uniform samples per step,
  // decoys separated by at least 0.05 mean probe TV.
  int hits = 0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    EnvConfig config;
    config.seed = 100 + static_cast<std::uint64_t>(rep);
    config.decoy_min_tv_sep = 0.05;
    config.decoy_scale = 0.5;
    LowRankMDP env = make_smooth_lowrank_mdp(config);
    HypothesisClass cls = make_hypothesis_class(env, config);
    bool all_correct = true;
    for (int h = 0; h < env.horizon(); ++h) {
      TransitionDataset data = collect_uniform(env, h, 2000, config.seed);
      MleResult fit = mle_fit(data, cls);
      all_correct = all_correct && fit.phi_index == cls.true_phi_index(h) &&
                    fit.psi_index == cls.true_psi_index(h);
    }
    if (all_correct) ++hits;
  }
  EXPECT_GE(hits, reps - 1);
}

TEST(MleFit, SampleSizeMonotonicity) {
  // TV error of the fit (against the data distribution) at n=2000 is no
  // worse than at n=200 in most seeded repetitions.
  int improved = 0;
  const int reps = 10;
  for (int rep = 0; rep < reps; ++rep) {
    EnvConfig config;
    config.seed = 300 + static_cast<std::uint64_t>(rep);
    config.decoy_scale = 0.15;
    LowRankMDP env = make_smooth_lowrank_mdp(config);
    HypothesisClass cls = make_hypothesis_class(env, config);

    TransitionDataset big = collect_uniform(env, 0, 2000, config.seed + 7000);
    TransitionDataset small(0, env.n_states(), env.action_dim());
    for (long i = 0; i < 200; ++i) small.append(big.samples()[static_cast<std::size_t>(i)]);

    auto fit_error = [&](const MleResult& fit) {
      double err = 0.0;
      for (const auto& sample : big.samples()) {
        Vec cand = fit.psi * (*fit.phi)(sample.s, sample.a);
        for (int i = 0; i < cand.size(); ++i) cand[i] = std::max(0.0, cand[i]);
        cand /= cand.sum();
        err += tv_distance(cand, env.transition_density(0, sample.s, sample.a));
      }
      return err / static_cast<double>(big.size());
    };

    double err_small = fit_error(mle_fit(small, cls));
    double err_big = fit_error(mle_fit(big, cls));
    if (err_big <= err_small + 1e-12) ++improved;
  }
  EXPECT_GE(improved, 8);
}

TEST(Samp, PointMassAlwaysReturnsSameState) {
  Vec e0(1);
  e0 << 1.0;
  auto phi = AffinePhi::constant(1, {e0, e0, e0});
  Mat psi(3, 1);
  psi << 1.0, 0.0, 0.0;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(samp(*phi, psi, 1, Action::Constant(1, 0.5), rng), 0);
  }
}

TEST(Samp, BernoulliFrequencies) {
  Vec e0(1);
  e0 << 1.0;
  auto phi = AffinePhi::constant(1, {e0});
  Mat psi(3, 1);
  psi << 0.5, 0.5, 0.0;
  Rng rng(11);
  const int n = 100000;
  int count0 = 0;
  for (int i = 0; i < n; ++i) {
    int s = samp(*phi, psi, 0, Action::Constant(1, 0.5), rng);
    ASSERT_NE(s, 2);
    if (s == 0) ++count0;
  }
  double freq = static_cast<double>(count0) / n;
  double se = std::sqrt(0.25 / n);
  EXPECT_NEAR(freq, 0.5, 3.0 * se);
}

TEST(Samp, ChiSquareAgainstExactDensity) {
  EnvConfig config;
  LowRankMDP env = make_smooth_lowrank_mdp(config);
  Action a = Action::Constant(1, 0.25);
  const int s = 1;
  Vec expected = env.transition_density(0, s, a);

  Rng rng(1234);
  const int n = 100000;
  Vec counts = Vec::Zero(env.n_states());
  for (int i = 0; i < n; ++i) {
    counts[samp(env.phi(0), env.psi(0), s, a, rng)] += 1.0;
  }
  double chi2 = 0.0;
  for (int i = 0; i < env.n_states(); ++i) {
    double e = expected[i] * n;
    if (e > 0.0) chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  // 2 degrees of freedom; rejection threshold at the 1e-3 level.
  EXPECT_LT(chi2, 13.816);
}

TEST(Dataset, CsvRoundTripShape) {
  TransitionDataset data(1, 3, 2);
  Action a(2);
  a << 0.25, 0.75;
  data.append(TransitionSample{0, a, 2, 3, 42});
  std::ostringstream os;
  data.write_csv(os);
  EXPECT_EQ(os.str(),
            "h,s,a_1,a_2,s_next,iter,seed\n"
            "1,0,0.25,0.75,2,3,42\n");
}

TEST(Dataset, RejectsBadSamples) {
  TransitionDataset data(0, 2, 1);
  EXPECT_THROW(data.append(TransitionSample{2, Action::Constant(1, 0.5), 0, 0, 0}),
               DomainError);
  EXPECT_THROW(data.append(TransitionSample{0, Action::Constant(1, 1.5), 0, 0, 0}),
               DomainError);
}

}  // namespace
}  // namespace flambe
