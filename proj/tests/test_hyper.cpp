#include "flambe/hyper.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace flambe {
namespace {

SmoothnessProfile profile_with(int m, double alpha_e, double l_e,
                               double alpha_t = 1.0, double l_t = 1.0,
                               double alpha_r = 1.0, double l_r = 1.0) {
  SmoothnessProfile p;
  p.m = m;
  p.alpha_e = alpha_e;
  p.l_e = l_e;
  p.alpha_t = alpha_t;
  p.l_t = l_t;
  p.alpha_r = alpha_r;
  p.l_r = l_r;
  return p;
}

TEST(Hyper, DerivedExponents) {
  HyperInputs in;
  in.profile = profile_with(1, 1.0, 1.0);
  in.d = 2;
  in.horizon = 2;
  in.eps = 0.5;
  in.delta = 0.1;
  in.k = 4.0;
  HyperParams out = theoretical_hyperparams(in);
  EXPECT_DOUBLE_EQ(out.tau, 1.0);
  EXPECT_DOUBLE_EQ(out.kappa, 0.5);
}

TEST(Hyper, BetaPrimeClosedForm) {
  // d=2, H=2, U=1, eps=0.5: beta' = 8 / (2^16 * 16 * 16 * 16 - 1).
  HyperInputs in;
  in.profile = profile_with(1, 1.0, 1.0);  // L_E = 1 so U = 1
  in.d = 2;
  in.horizon = 2;
  in.eps = 0.5;
  in.delta = 0.1;
  in.k = 4.0;
  HyperParams out = theoretical_hyperparams(in);
  EXPECT_DOUBLE_EQ(out.u, 1.0);
  EXPECT_DOUBLE_EQ(out.beta, 8.0 / (std::pow(2.0, 28) - 1.0));
}

TEST(Hyper, PrintedFormulaSubstitution) {
  // Full independent recomputation of the assignments for the worked
  // configuration (eps=0.5, delta=0.1, d=2, H=2, m=1, alpha_E=1, L_E=1,
  // |Phi| = |Psi| = 5, K = 4).
  HyperInputs in;
  in.profile = profile_with(1, 1.0, 1.0);
  in.d = 2;
  in.horizon = 2;
  in.eps = 0.5;
  in.delta = 0.1;
  in.n_phi = 5;
  in.n_psi = 5;
  in.k = 4.0;
  HyperParams out = theoretical_hyperparams(in);

  const double tau = 1.0;
  const double u = 1.0;
  const double beta_prime = 8.0 / (std::pow(2.0, 28) - 1.0);
  const double logb = std::log(1.0 + 8.0 / beta_prime);
  const double eps_tv = std::pow(8.0, -8.0) * std::pow(2.0, -16.0) *
                        std::pow(u, -8.0) * std::pow(4.0, -4.0) *
                        std::pow(2.0, -4.0) * std::pow(0.5, 8.0) /
                        std::pow(logb, 4.0);
  EXPECT_NEAR(out.eps_tv, eps_tv, eps_tv * 1e-12);

  const double lambda = 0.5 * std::pow(8.0, -8.0) * std::pow(2.0, -16.0) *
                        std::pow(u, -8.0) * std::pow(4.0, -4.0) *
                        std::pow(2.0, -5.0) * std::pow(0.5, 8.0) /
                        std::pow(logb, 4.0);
  EXPECT_NEAR(out.lambda, lambda, lambda * 1e-12);
  EXPECT_NEAR(out.lambda, out.eps_tv / (2.0 * in.d), out.lambda * 1e-12);

  const double tvp = std::pow(eps_tv, 1.0 / (2.0 * (1.0 + tau)));
  const double x = 4.0 * in.horizon * in.d / (lambda * u * tvp);
  const double j_max =
      x * std::log(1.0 + 4.0 * in.horizon / (lambda * u * tvp));
  EXPECT_NEAR(out.j_max, j_max, j_max * 1e-12);

  const double n = std::pow(8.0, 8.0) * std::pow(2.0, 16.0) *
                   std::pow(4.0, 4.0) * std::pow(2.0, 4.0) *
                   std::pow(logb, 4.0) / std::pow(0.5, 8.0) *
                   std::log(j_max * 2.0 * 25.0 / 0.1);
  EXPECT_NEAR(out.n, n, n * 1e-12);
  EXPECT_NEAR(out.trajectory_count, out.n * out.j_max * 2.0,
              out.trajectory_count * 1e-12);
}

TEST(Hyper, UnrestrictedScopeComputesK) {
  // m=1, alpha_T = alpha_R = 0.5, H=2, L=1, eps=0.5:
  // sigma = 2 and K = (8 * 1 * 2 * 1 / 0.5)^2 = 1024, exactly.
  HyperInputs in;
  in.profile = profile_with(1, 1.0, 1.0, 0.5, 1.0, 0.5, 0.5);
  in.d = 2;
  in.horizon = 2;
  in.eps = 0.5;
  in.delta = 0.1;
  in.scope = PolicyScope::UnrestrictedPolicy;
  HyperParams out = theoretical_hyperparams(in);
  EXPECT_DOUBLE_EQ(out.sigma, 2.0);
  EXPECT_DOUBLE_EQ(out.k, 1024.0);

  // The remaining assignments run at eps/2 with that K.
  HyperInputs restricted = in;
  restricted.scope = PolicyScope::RestrictedPolicy;
  restricted.k = 1024.0;
  restricted.eps = 0.25;
  HyperParams expected = theoretical_hyperparams(restricted);
  EXPECT_DOUBLE_EQ(out.n, expected.n);
  EXPECT_DOUBLE_EQ(out.j_max, expected.j_max);
  EXPECT_DOUBLE_EQ(out.beta, expected.beta);
}

TEST(Hyper, BetaPrimeDomainError) {
  // Tiny L_E makes U so small that the denominator goes nonpositive.
  HyperInputs in;
  in.profile = profile_with(1, 1.0, 1e-12);
  in.d = 1;
  in.horizon = 1;
  in.eps = 0.9;
  in.delta = 0.1;
  in.k = 1.0;
  EXPECT_THROW(theoretical_hyperparams(in), DomainError);
}

TEST(Hyper, FrozenLogSlopeMatchesTheory) {
  for (double tau : {0.5, 1.0, 2.0}) {
    HyperInputs ref;
    ref.profile = profile_with(1, 1.0 / tau, 1.0);
    ref.d = 2;
    ref.horizon = 2;
    ref.delta = 0.05;
    ref.k = 4.0;
    ref.eps = std::pow(2.0, -3);

    std::vector<double> log_inv_eps;
    std::vector<double> log_count;
    for (int p = 3; p <= 8; ++p) {
      HyperInputs in = ref;
      in.eps = std::pow(2.0, -p);
      HyperParams out = theoretical_hyperparams_frozen(in, ref);
      log_inv_eps.push_back(std::log(1.0 / in.eps));
      log_count.push_back(std::log(out.trajectory_count));
    }
    // least-squares slope
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < log_inv_eps.size(); ++i) {
      mx += log_inv_eps[i];
      my += log_count[i];
    }
    mx /= log_inv_eps.size();
    my /= log_count.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < log_inv_eps.size(); ++i) {
      sxy += (log_inv_eps[i] - mx) * (log_count[i] - my);
      sxx += (log_inv_eps[i] - mx) * (log_inv_eps[i] - mx);
    }
    double slope = sxy / sxx;
    EXPECT_NEAR(slope, 10.0 + 8.0 * tau, 1e-9) << "tau " << tau;
  }
}

TEST(Hyper, MonotoneInProblemParameters) {
  HyperInputs base;
  base.profile = profile_with(1, 1.0, 1.0);
  base.d = 2;
  base.horizon = 3;
  base.eps = 0.1;
  base.delta = 0.05;
  base.k = 2.0;
  HyperParams ref = theoretical_hyperparams(base);

  {  // larger eps: fewer samples and rounds
    HyperInputs in = base;
    in.eps = 0.2;
    HyperParams out = theoretical_hyperparams(in);
    EXPECT_LE(out.n, ref.n);
    EXPECT_LE(out.j_max, ref.j_max);
  }
  for (int h : {4, 6}) {  // larger horizon: more of both
    HyperInputs in = base;
    in.horizon = h;
    HyperParams out = theoretical_hyperparams(in);
    EXPECT_GE(out.n, ref.n);
    EXPECT_GE(out.j_max, ref.j_max);
  }
  for (int d : {3, 5}) {
    HyperInputs in = base;
    in.d = d;
    HyperParams out = theoretical_hyperparams(in);
    EXPECT_GE(out.n, ref.n);
    EXPECT_GE(out.j_max, ref.j_max);
  }
  for (double l : {2.0, 8.0}) {
    HyperInputs in = base;
    in.profile.l_e = l;
    HyperParams out = theoretical_hyperparams(in);
    EXPECT_GE(out.n, ref.n);
    EXPECT_GE(out.j_max, ref.j_max);
  }
}

TEST(Hyper, RejectsBadInputs) {
  HyperInputs in;
  in.profile = profile_with(1, 1.0, 1.0);
  in.eps = 0.0;
  EXPECT_THROW(theoretical_hyperparams(in), DomainError);
  in.eps = 0.1;
  in.k = 0.5;
  EXPECT_THROW(theoretical_hyperparams(in), DomainError);
}

}  // namespace
}  // namespace flambe
