#include "flambe/smoothness.hpp"

#include "flambe/value.hpp"

#include <cmath>

namespace flambe {

void SmoothnessProfile::validate() const {
  require(m >= 1, "SmoothnessProfile: m must be >= 1");
  require(alpha_e > 0.0, "SmoothnessProfile: alpha_e must be positive");
  require(alpha_t > 0.0 && alpha_t <= 1.0,
          "SmoothnessProfile: alpha_t must be in (0,1]");
  require(alpha_r > 0.0 && alpha_r <= 1.0,
          "SmoothnessProfile: alpha_r must be in (0,1]");
  require(l_e >= 0.0 && l_t >= 0.0 && l_r >= 0.0,
          "SmoothnessProfile: negative smoothness scale");
}

namespace {

// Enumerate midpoint pairs within a Chebyshev window of `window` cells and
// fold the Hölder quotient of a scalar or vector difference norm.
template <typename DiffNorm>
double pair_quotient(const QuadratureGrid& grid, double alpha,
                     DiffNorm&& diff_norm) {
  const int m = grid.m();
  const int g = grid.g();
  const int window = 4;
  double best = 0.0;
  std::vector<long> strides(static_cast<std::size_t>(m));
  {
    long s = 1;
    for (int k = m - 1; k >= 0; --k) {
      strides[static_cast<std::size_t>(k)] = s;
      s *= g;
    }
  }
  std::vector<long> digits(static_cast<std::size_t>(m), 0);
  std::vector<long> offs(static_cast<std::size_t>(m), 0);
  const double h = grid.cell_width();

  for (long c = 0; c < grid.n_cells(); ++c) {
    // decode digits of c
    {
      long rest = c;
      for (int k = m - 1; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] = rest % g;
        rest /= g;
      }
    }
    // iterate over offsets in [-window, window]^m, lexicographically after c
    long n_offsets = 1;
    for (int k = 0; k < m; ++k) n_offsets *= (2 * window + 1);
    for (long oi = 0; oi < n_offsets; ++oi) {
      long rest = oi;
      bool ok = true;
      long c2 = c;
      double dist2 = 0.0;
      for (int k = m - 1; k >= 0; --k) {
        long off = rest % (2 * window + 1) - window;
        rest /= (2 * window + 1);
        long d2 = digits[static_cast<std::size_t>(k)] + off;
        if (d2 < 0 || d2 >= g) {
          ok = false;
          break;
        }
        c2 += off * strides[static_cast<std::size_t>(k)];
        dist2 += static_cast<double>(off) * static_cast<double>(off);
      }
      if (!ok || c2 <= c) continue;
      double dist = std::sqrt(dist2) * h;
      double q = diff_norm(c, c2) / std::pow(dist, alpha);
      best = std::max(best, q);
    }
  }
  return best;
}

}  // namespace

double holder_quotient_estimate(const GridFunction& f, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0,
          "holder estimate: alpha must be in (0,1]");
  require(f.grid.g() >= 16, "holder estimate: need >= 16 points per dim");
  return pair_quotient(f.grid, alpha, [&](long a, long b) {
    return std::abs(f.values[static_cast<std::size_t>(a)] -
                    f.values[static_cast<std::size_t>(b)]);
  });
}

double holder_norm_estimate(const GridFunction& f, double alpha) {
  double max_abs = 0.0;
  for (double v : f.values) max_abs = std::max(max_abs, std::abs(v));
  return std::max(max_abs, holder_quotient_estimate(f, alpha));
}

double holder_quotient_estimate_vec(
    const QuadratureGrid& grid,
    const std::function<Vec(const Action&)>& eval, double alpha) {
  return holder_quotient_estimate_metric(
      grid, eval, [](const Vec& a, const Vec& b) { return (a - b).norm(); },
      alpha);
}

double holder_quotient_estimate_metric(
    const QuadratureGrid& grid,
    const std::function<Vec(const Action&)>& eval,
    const std::function<double(const Vec&, const Vec&)>& diff, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0,
          "holder estimate: alpha must be in (0,1]");
  require(grid.g() >= 16, "holder estimate: need >= 16 points per dim");
  std::vector<Vec> table(static_cast<std::size_t>(grid.n_cells()));
  for (long c = 0; c < grid.n_cells(); ++c) {
    table[static_cast<std::size_t>(c)] = eval(grid.midpoint(c));
  }
  return pair_quotient(grid, alpha, [&](long a, long b) {
    return diff(table[static_cast<std::size_t>(a)],
                table[static_cast<std::size_t>(b)]);
  });
}

UniformBoundResult uniform_bound_check(const GridFunction& f, double alpha,
                                       double l, double c_cal) {
  require(alpha > 0.0, "uniform_bound_check: alpha must be positive");
  require(l >= 0.0, "uniform_bound_check: L must be nonnegative");
  for (double v : f.values) {
    if (v < -1e-12) {
      throw DomainError("uniform_bound_check: f must be nonnegative");
    }
  }
  double estimate = holder_norm_estimate(f, std::min(alpha, 1.0));
  if (l < estimate - 1e-9) {
    throw DomainError(
        "uniform_bound_check: L is below the grid estimate of ||f||_C^alpha");
  }

  const int m = f.grid.m();
  UniformBoundResult out;
  out.sup = f.max();
  out.mean = f.mean();
  double l_pow = std::pow(l, static_cast<double>(m) / (m + alpha));
  double mean_pow = std::pow(std::max(0.0, out.mean), alpha / (m + alpha));
  out.bound = c_cal * l_pow * mean_pow;
  double slack =
      2.0 * l * std::pow(std::sqrt(static_cast<double>(m)) / f.grid.g(),
                         std::min(alpha, 1.0));
  out.holds = out.sup <= out.bound + slack;
  double denom = l_pow * mean_pow;
  out.ratio = denom > 0.0 ? out.sup / denom : (out.sup > 0.0 ? 1e300 : 0.0);
  return out;
}

PolicyGapResult policy_gap_check(const LowRankMDP& env, PolicyPtr base,
                                 double k, const RewardFunction& reward,
                                 const SmoothnessProfile& profile,
                                 const QuadratureGrid& grid) {
  if (!reward.smoothness().has_value()) {
    throw DomainError("policy_gap_check: reward lacks smoothness metadata");
  }
  profile.validate();
  const int m = env.action_dim();
  const double alpha =
      std::min({profile.alpha_t, reward.smoothness()->alpha, 1.0});
  const double l = std::max(profile.l_t, reward.smoothness()->l);

  PolicyGapResult out;
  out.value_base = value_exact(env, *base, reward, grid);
  PolicyPtr smoothed = smooth_policy(base, k);
  out.value_smoothed = value_exact(env, *smoothed, reward, grid);
  out.gap = std::abs(out.value_base - out.value_smoothed);
  out.bound = 2.0 * std::sqrt(static_cast<double>(m)) * l * env.horizon() *
              std::pow(k, -alpha / m);
  out.tolerance =
      2.0 * l * std::pow(std::sqrt(static_cast<double>(m)) / grid.g(), alpha);
  out.holds = out.gap <= out.bound + out.tolerance;
  return out;
}

ExpectationGapResult smoothing_expectation_gap(
    const Policy& base, double k, int h, int s,
    const std::function<double(const Action&)>& f, double alpha, double l,
    const QuadratureGrid& grid) {
  require(alpha > 0.0 && alpha <= 1.0,
          "smoothing_expectation_gap: alpha must be in (0,1]");
  SmoothedPolicy smoothed(
      PolicyPtr(&base, [](const Policy*) {}), k);

  double e_base = 0.0;
  base.visit(h, s, grid, [&](const Action& a, double w) { e_base += w * f(a); });
  double e_smoothed = 0.0;
  smoothed.visit(h, s, grid,
                 [&](const Action& a, double w) { e_smoothed += w * f(a); });

  const int m = base.action_dim();
  ExpectationGapResult out;
  out.gap = e_smoothed - e_base;
  out.bound =
      std::sqrt(static_cast<double>(m)) * l * std::pow(k, -alpha / m);
  out.tolerance =
      2.0 * l * std::pow(std::sqrt(static_cast<double>(m)) / grid.g(), alpha);
  out.holds = out.gap <= out.bound + out.tolerance;
  return out;
}

}  // namespace flambe
