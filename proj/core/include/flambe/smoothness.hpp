#pragma once

#include "flambe/mdp.hpp"
#include "flambe/policy.hpp"
#include "flambe/quadrature.hpp"

namespace flambe {

/**
 * Action-smoothness constants of a problem instance:
 *   (alpha_e, l_e)  — smoothness of the transition-error functional across
 *                     the hypothesis class,
 *   (alpha_t, l_t)  — TV-continuity of the true transitions,
 *   (alpha_r, l_r)  — Hölder continuity of the reward family.
 * Derived exponents are recomputed on demand and never stored.
 */
struct SmoothnessProfile {
  int m = 1;
  double alpha_e = 1.0;
  double l_e = 0.0;
  double alpha_t = 1.0;
  double l_t = 0.0;
  double alpha_r = 1.0;
  double l_r = 0.0;

  // Measurement metadata.
  int grid_resolution = 0;
  double l_phi = 0.0;          // class-wide Hölder constant of a -> phi(s,a)
  double l_e_hellinger = 0.0;  // diagnostic: Hellinger error functional

  double tau() const { return static_cast<double>(m) / alpha_e; }
  double kappa() const { return static_cast<double>(m) / (m + alpha_e); }
  double sigma() const {
    return static_cast<double>(m) / std::min(alpha_t, alpha_r);
  }
  double l_combined() const { return std::max(l_t, l_r); }

  void validate() const;
};

/**
 * Grid lower bound on the Hölder/smoothness norm ||f||_{C^alpha} for
 * alpha in (0,1]: the larger of max |f| and the maximal pair quotient
 * |f(a) - f(a')| / ||a - a'||_2^alpha over grid pairs within a Chebyshev
 * window of 4 cells. Requires at least 16 points per dimension.
 */
double holder_norm_estimate(const GridFunction& f, double alpha);

// Pair-quotient part only (no sup-norm term); this is the "Hölder
// constant" used by the smoothness certificate.
double holder_quotient_estimate(const GridFunction& f, double alpha);

// Same quotient for a vector-valued map a -> g(a) in R^p, with the L2 norm
// on values. `eval` is tabulated on the grid midpoints.
double holder_quotient_estimate_vec(
    const QuadratureGrid& grid,
    const std::function<Vec(const Action&)>& eval, double alpha);

// Fully general variant with a caller-supplied difference metric on the
// tabulated values (e.g. TV or Hellinger between density vectors).
double holder_quotient_estimate_metric(
    const QuadratureGrid& grid,
    const std::function<Vec(const Action&)>& eval,
    const std::function<double(const Vec&, const Vec&)>& diff, double alpha);

struct UniformBoundResult {
  double sup = 0.0;
  double mean = 0.0;
  double bound = 0.0;
  bool holds = false;
  double ratio = 0.0;  // sup / (L^{m/(m+alpha)} mean^{alpha/(m+alpha)})
};

/**
 * Checks the sup-vs-mean interpolation bound for a nonnegative grid
 * function with ||f||_{C^alpha} <= L:
 *
 *   sup f  <=  c_cal * L^{m/(m+alpha)} * (mean f)^{alpha/(m+alpha)}
 *
 * `holds` allows a quadrature slack of 2 L (sqrt(m)/G)^alpha, the largest
 * amount by which grid values can miss the true sup.
 */
UniformBoundResult uniform_bound_check(const GridFunction& f, double alpha,
                                       double l, double c_cal);

struct PolicyGapResult {
  double gap = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  double value_base = 0.0;
  double value_smoothed = 0.0;
};

/**
 * Value gap between a base policy and its smoothed version at width K,
 * against the bound 2 sqrt(m) L H K^{-alpha/m} with alpha =
 * min(alpha_t, alpha_r, 1) and L = max(l_t, l_r) from the profile.
 */
PolicyGapResult policy_gap_check(const LowRankMDP& env, PolicyPtr base,
                                 double k, const RewardFunction& reward,
                                 const SmoothnessProfile& profile,
                                 const QuadratureGrid& grid);

struct ExpectationGapResult {
  double gap = 0.0;    // E_{pi_K}[f] - E_pi[f]
  double bound = 0.0;  // sqrt(m) L K^{-alpha/m}
  double tolerance = 0.0;
  bool holds = false;
};

// One-sided expectation-shift check for a single alpha-Hölder test
// function f with norm at most L, at a fixed (h, s).
ExpectationGapResult smoothing_expectation_gap(
    const Policy& base, double k, int h, int s,
    const std::function<double(const Action&)>& f, double alpha, double l,
    const QuadratureGrid& grid);

}  // namespace flambe
