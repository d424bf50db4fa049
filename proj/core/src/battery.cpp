#include "flambe/battery.hpp"

#include <cmath>

namespace flambe {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Hölder-alpha constant of a bounded Lipschitz function on [0,1]^m:
// |df| <= min(range, lip * t) gives quotient <= max over t of
// min(range, lip t) / t^alpha, attained at t = range / lip.
double lipschitz_to_holder(double lip, double range, double alpha) {
  if (lip <= 0.0) return 0.0;
  if (alpha >= 1.0) return lip;
  double t_star = range / lip;
  return lip * std::pow(t_star, 1.0 - alpha);
}
}  // namespace

TestFunction cusp_bump(int m, double alpha, double r, double l0) {
  TestFunction f;
  f.name = "bump_r" + std::to_string(r);
  f.m = m;
  f.alpha = alpha;
  f.l = l0 * std::max(1.0, std::pow(r, alpha));  // = l0 for r <= 1
  Action center = Action::Constant(m, 0.5);
  f.fn = [m, alpha, r, l0, center](const Action& a) {
    double dist = (a - center).norm();
    double t = std::max(0.0, r - dist);
    return l0 * std::pow(t, alpha);
  };
  return f;
}

std::vector<TestFunction> theorem1_battery(int m, double alpha) {
  std::vector<TestFunction> battery;

  for (double c : {0.25, 1.0}) {
    TestFunction f;
    f.name = "const_" + std::to_string(c);
    f.m = m;
    f.alpha = alpha;
    f.l = c;
    f.fn = [c](const Action&) { return c; };
    battery.push_back(std::move(f));
  }

  for (double r : {0.25, 0.125}) {
    battery.push_back(cusp_bump(m, alpha, r, 1.0));
    battery.push_back(cusp_bump(m, alpha, r, 2.0));
  }

  // Trigonometric ridges (1 + sin(2 pi k u)) / 2 along each axis and along
  // the diagonal; Lipschitz constant pi k ||w||_2 for direction w.
  for (int k = 1; k <= 3; ++k) {
    for (int axis = 0; axis < m; ++axis) {
      TestFunction f;
      f.name = "sin_k" + std::to_string(k) + "_axis" + std::to_string(axis);
      f.m = m;
      f.alpha = alpha;
      f.l = std::max(1.0, lipschitz_to_holder(kPi * k, 1.0, alpha));
      f.fn = [k, axis](const Action& a) {
        return 0.5 * (1.0 + std::sin(2.0 * kPi * k * a[axis]));
      };
      battery.push_back(std::move(f));
    }
  }
  if (m > 1) {
    TestFunction f;
    f.name = "sin_diagonal";
    f.m = m;
    f.alpha = alpha;
    double lip = kPi * std::sqrt(static_cast<double>(m));
    f.l = std::max(1.0, lipschitz_to_holder(lip, 1.0, alpha));
    f.fn = [m](const Action& a) {
      double u = 0.0;
      for (int k = 0; k < m; ++k) u += a[k];
      return 0.5 * (1.0 + std::sin(kPi * u));
    };
    battery.push_back(std::move(f));
  }

  // Squared sine hill, smooth and vanishing at the boundary.
  {
    TestFunction f;
    f.name = "sin2_hill";
    f.m = m;
    f.alpha = alpha;
    double lip = kPi * std::sqrt(static_cast<double>(m));
    f.l = std::max(1.0, lipschitz_to_holder(lip, 1.0, alpha));
    f.fn = [m](const Action& a) {
      double v = 1.0;
      for (int k = 0; k < m; ++k) {
        double s = std::sin(kPi * a[k]);
        v *= s * s;
      }
      return v;
    };
    battery.push_back(std::move(f));
  }

  return battery;
}

std::vector<double> bump_slope_radii() {
  return {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
}

double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2,
          "regression_slope: need matching series with >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, "regression_slope: degenerate x series");
  return sxy / sxx;
}

}  // namespace flambe
