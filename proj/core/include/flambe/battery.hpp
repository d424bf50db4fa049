#pragma once

#include "flambe/quadrature.hpp"

#include <functional>
#include <string>

namespace flambe {

// A nonnegative test function on [0,1]^m with a known valid bound on its
// C^alpha norm; the declared battery drives the uniform-bound verifier.
struct TestFunction {
  std::string name;
  int m = 1;
  double alpha = 1.0;
  double l = 0.0;  // valid upper bound on ||f||_{C^alpha}
  std::function<double(const Action&)> fn;
};

// Cusp bump centered at c with radius r and amplitude scale l0:
//   f(a) = l0 * max(0, r - ||a - c||_2)^alpha
// ||f||_{C^alpha} <= l0 for r <= 1; the family is extremal for the
// sup-vs-mean bound, with sup = l0 r^alpha and a closed-form mean.
TestFunction cusp_bump(int m, double alpha, double r, double l0);

// The declared verifier battery for one (m, alpha) combination:
// constants, cusp bumps, and trigonometric ridges.
std::vector<TestFunction> theorem1_battery(int m, double alpha);

// Bump radii used by the log-log slope study.
std::vector<double> bump_slope_radii();

// Least-squares slope of y on x.
double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace flambe
