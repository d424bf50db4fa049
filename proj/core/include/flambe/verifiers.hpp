#pragma once

#include "flambe/battery.hpp"
#include "flambe/driver.hpp"
#include "flambe/env_factory.hpp"
#include "flambe/smoothness.hpp"

#include <string>

namespace flambe {

// Numerical verification suites for the paper-level inequalities that are
// checkable on small instances. Each suite returns per-case rows plus an
// aggregate verdict; the CLI renders them as CSV and the acceptance tests
// assert on them.

struct Theorem1Row {
  std::string name;
  int m = 1;
  double alpha = 1.0;
  double l = 0.0;
  double sup = 0.0;
  double mean = 0.0;
  double bound = 0.0;   // at the suite's calibrated c_cal
  double ratio = 0.0;   // sup / (L^{m/(m+alpha)} mean^{alpha/(m+alpha)})
  bool holds = false;
};

struct SlopeRow {
  int m = 1;
  double alpha = 1.0;
  double slope = 0.0;
  double expected = 0.0;  // alpha / (m + alpha)
  bool holds = false;     // within +-0.02
};

struct ScaleInvarianceRow {
  std::string name;
  double scale = 1.0;
  bool holds_base = false;
  bool holds_scaled = false;
  bool invariant = false;  // the two verdicts agree
};

struct Theorem1Suite {
  std::vector<Theorem1Row> rows;
  std::vector<SlopeRow> slopes;
  std::vector<ScaleInvarianceRow> scale_rows;
  double c_cal = 1.0;  // smallest constant covering the battery (at least 1)
  bool all_hold = false;
};

// Battery check over m in {1,2} x alpha in {0.5, 1}: the sup-vs-mean bound
// at the calibrated constant, the bump-family log-log slope, and scale
// invariance at s in {1e-3, 1, 1e3}. Odd grid resolutions place the bump
// peak on a midpoint, keeping the slope study unbiased.
Theorem1Suite run_theorem1_suite(int grid_resolution = 2047,
                                 int grid_resolution_2d = 129);

struct SmoothingGapRow {
  std::string function;
  std::string base;
  double k = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct SmoothingSuite {
  std::vector<SmoothingGapRow> rows;
  bool all_hold = false;
};

// Expectation-shift bound for smoothed policies on the Hölder battery,
// across deterministic bases (interior and boundary) and grid mixtures.
SmoothingSuite run_smoothing_suite(int grid_resolution = 512);

struct PolicyGapRow {
  std::uint64_t seed = 0;
  double k = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct PolicyGapSuite {
  std::vector<PolicyGapRow> rows;
  bool all_hold = false;
  // Fraction of seeds where the gap is nonincreasing in K.
  double monotone_fraction = 0.0;
};

// Full value-gap check on seeded factory environments with certified
// (alpha, L), at each smoothing level in `ks`.
PolicyGapSuite run_policy_gap_suite(const std::vector<std::uint64_t>& seeds,
                                    const std::vector<double>& ks,
                                    int grid_resolution = 64);

struct DiscreteIsRow {
  int g = 0;
  int pair_index = 0;
  double lhs = 0.0;  // E_pi[f]
  double rhs = 0.0;  // G^m E_unif[f]
  bool holds = false;
};

struct DiscreteIsSuite {
  std::vector<DiscreteIsRow> rows;
  int violations = 0;
};

// Exact enumeration of the discrete importance-sampling inequality
// E_pi[f] <= |A| E_unif[f] for grid-mixture policies on G-cell grids.
DiscreteIsSuite run_discrete_is_suite(const std::vector<int>& gs, int m,
                                      int n_pairs, std::uint64_t seed);

struct CertificateRow {
  std::uint64_t seed = 0;
  double l_phi = 0.0;
  double l_e = 0.0;
  double l_e_cap = 0.0;  // 2 d l_phi
  bool holds = false;
};

struct CertificateSuite {
  std::vector<CertificateRow> rows;
  bool all_hold = false;
};

// Error-functional smoothness bound l_e <= 2 d l_phi on seeded generated
// hypothesis classes.
CertificateSuite run_certificate_suite(const std::vector<std::uint64_t>& seeds,
                                       int grid_resolution = 64);

}  // namespace flambe
