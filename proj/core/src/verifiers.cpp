#include "flambe/verifiers.hpp"

#include <cmath>

namespace flambe {

Theorem1Suite run_theorem1_suite(int grid_resolution, int grid_resolution_2d) {
  Theorem1Suite suite;

  const std::vector<int> ms = {1, 2};
  const std::vector<double> alphas = {0.5, 1.0};

  // First pass: calibrate c_cal as the largest observed ratio.
  double c_cal = 1.0;
  for (int m : ms) {
    const int g = m == 1 ? grid_resolution : grid_resolution_2d;
    for (double alpha : alphas) {
      for (const TestFunction& f : theorem1_battery(m, alpha)) {
        GridFunction values = GridFunction::tabulate(QuadratureGrid(m, g), f.fn);
        UniformBoundResult r = uniform_bound_check(values, alpha, f.l, 1.0);
        c_cal = std::max(c_cal, r.ratio);
      }
    }
  }
  suite.c_cal = c_cal;

  bool all_hold = true;
  for (int m : ms) {
    const int g = m == 1 ? grid_resolution : grid_resolution_2d;
    for (double alpha : alphas) {
      for (const TestFunction& f : theorem1_battery(m, alpha)) {
        GridFunction values = GridFunction::tabulate(QuadratureGrid(m, g), f.fn);
        // The first-order case must hold at the analytic constant 1; the
        // others run at the calibrated constant.
        const double c = (m == 1 && alpha == 1.0) ? 1.0 : c_cal;
        UniformBoundResult r = uniform_bound_check(values, alpha, f.l, c);
        Theorem1Row row;
        row.name = f.name;
        row.m = m;
        row.alpha = alpha;
        row.l = f.l;
        row.sup = r.sup;
        row.mean = r.mean;
        row.bound = r.bound;
        row.ratio = r.ratio;
        row.holds = r.holds;
        all_hold = all_hold && r.holds;
        suite.rows.push_back(std::move(row));
      }
    }
  }

  // Bump-family slope: log sup vs log mean across radii follows the
  // exponent alpha / (m + alpha).
  for (int m : ms) {
    const int g = m == 1 ? grid_resolution : grid_resolution_2d;
    for (double alpha : alphas) {
      std::vector<double> log_mean;
      std::vector<double> log_sup;
      for (double r : bump_slope_radii()) {
        if (m == 2 && r < 1.0 / 16) continue;  // below 2-d grid resolution
        TestFunction f = cusp_bump(m, alpha, r, 1.0);
        GridFunction values = GridFunction::tabulate(QuadratureGrid(m, g), f.fn);
        log_mean.push_back(std::log(values.mean()));
        log_sup.push_back(std::log(values.max()));
      }
      SlopeRow row;
      row.m = m;
      row.alpha = alpha;
      row.slope = regression_slope(log_mean, log_sup);
      row.expected = alpha / (m + alpha);
      row.holds = std::abs(row.slope - row.expected) <= 0.02;
      all_hold = all_hold && row.holds;
      suite.slopes.push_back(row);
    }
  }

  // Scale invariance: f -> s f with L -> s L leaves the verdict unchanged.
  {
    const int m = 1;
    const double alpha = 1.0;
    for (const TestFunction& f : theorem1_battery(m, alpha)) {
      GridFunction values =
          GridFunction::tabulate(QuadratureGrid(m, grid_resolution), f.fn);
      UniformBoundResult base = uniform_bound_check(values, alpha, f.l, 1.0);
      for (double s : {1e-3, 1.0, 1e3}) {
        GridFunction scaled = values;
        for (double& v : scaled.values) v *= s;
        UniformBoundResult r = uniform_bound_check(scaled, alpha, s * f.l, 1.0);
        ScaleInvarianceRow row;
        row.name = f.name;
        row.scale = s;
        row.holds_base = base.holds;
        row.holds_scaled = r.holds;
        row.invariant = base.holds == r.holds;
        all_hold = all_hold && row.invariant;
        suite.scale_rows.push_back(row);
      }
    }
  }

  suite.all_hold = all_hold;
  return suite;
}

SmoothingSuite run_smoothing_suite(int grid_resolution) {
  SmoothingSuite suite;
  bool all_hold = true;

  const int m = 1;
  QuadratureGrid grid(m, grid_resolution);

  struct Base {
    std::string name;
    PolicyPtr policy;
  };
  std::vector<Base> bases;
  {
    auto det_at = [&](double x) {
      std::vector<std::vector<Action>> actions(
          1, std::vector<Action>(1, Action::Constant(1, x)));
      return std::make_shared<DeterministicPolicy>(1, std::move(actions));
    };
    bases.push_back({"det_center", det_at(0.5)});
    bases.push_back({"det_boundary", det_at(0.0)});
    bases.push_back({"det_offcenter", det_at(0.77)});
    bases.push_back({"uniform", std::make_shared<UniformRandomPolicy>(1)});
    bases.push_back({"grid8", GridMixturePolicy::uniform(1, 1, 1, 8)});
  }

  for (double alpha : {0.5, 1.0}) {
    for (const TestFunction& f : theorem1_battery(m, alpha)) {
      for (const Base& base : bases) {
        for (double k : {4.0, 16.0, 64.0}) {
          ExpectationGapResult r = smoothing_expectation_gap(
              *base.policy, k, 0, 0, f.fn, alpha, f.l, grid);
          SmoothingGapRow row;
          row.function = f.name;
          row.base = base.name;
          row.k = k;
          row.gap = r.gap;
          row.bound = r.bound;
          row.holds = r.holds;
          all_hold = all_hold && r.holds;
          suite.rows.push_back(std::move(row));
        }
      }
    }
  }

  suite.all_hold = all_hold;
  return suite;
}

PolicyGapSuite run_policy_gap_suite(const std::vector<std::uint64_t>& seeds,
                                    const std::vector<double>& ks,
                                    int grid_resolution) {
  PolicyGapSuite suite;
  bool all_hold = true;
  int monotone = 0;

  for (std::uint64_t seed : seeds) {
    EnvConfig config;
    config.seed = seed;
    config.n_phi_decoys = 0;
    config.n_psi_decoys = 0;
    LowRankMDP env = make_smooth_lowrank_mdp(config);
    HypothesisClass cls = make_hypothesis_class(env, config);
    SmoothnessProfile profile = smoothness_certificate(cls, env, 64);

    // A Hölder reward and a deterministic base policy, both seeded.
    std::vector<RewardFunction> rewards = make_eval_rewards(env, 1, seed);
    profile.alpha_r = rewards[0].smoothness()->alpha;
    profile.l_r = rewards[0].smoothness()->l;

    Rng rng = Rng::derived(seed, {0x67ULL});
    std::vector<std::vector<Action>> actions(
        static_cast<std::size_t>(env.horizon()),
        std::vector<Action>(static_cast<std::size_t>(env.n_states())));
    for (auto& row : actions) {
      for (Action& a : row) a = rng.uniform_action(env.action_dim());
    }
    PolicyPtr base =
        std::make_shared<DeterministicPolicy>(env.action_dim(), actions);

    QuadratureGrid grid(env.action_dim(), grid_resolution);
    double prev_gap = std::numeric_limits<double>::infinity();
    bool nonincreasing = true;
    for (double k : ks) {
      PolicyGapResult r =
          policy_gap_check(env, base, k, rewards[0], profile, grid);
      PolicyGapRow row;
      row.seed = seed;
      row.k = k;
      row.gap = r.gap;
      row.bound = r.bound;
      row.holds = r.holds;
      all_hold = all_hold && r.holds;
      suite.rows.push_back(row);
      if (r.gap > prev_gap + 1e-9) nonincreasing = false;
      prev_gap = r.gap;
    }
    if (nonincreasing) ++monotone;
  }

  suite.all_hold = all_hold;
  suite.monotone_fraction =
      seeds.empty() ? 0.0
                    : static_cast<double>(monotone) /
                          static_cast<double>(seeds.size());
  return suite;
}

DiscreteIsSuite run_discrete_is_suite(const std::vector<int>& gs, int m,
                                      int n_pairs, std::uint64_t seed) {
  DiscreteIsSuite suite;
  for (int g : gs) {
    QuadratureGrid cells(m, g);
    const long n_cells = cells.n_cells();
    for (int pair = 0; pair < n_pairs; ++pair) {
      Rng rng = Rng::derived(seed, {static_cast<std::uint64_t>(g),
                                    static_cast<std::uint64_t>(pair)});
      const int n_states = 3;
      // random state distribution, random cell policy, random nonnegative f
      Vec rho(n_states);
      for (int s = 0; s < n_states; ++s) rho[s] = rng.uniform() + 1e-3;
      rho /= rho.sum();
      std::vector<Vec> pi(static_cast<std::size_t>(n_states));
      std::vector<Vec> f(static_cast<std::size_t>(n_states));
      for (int s = 0; s < n_states; ++s) {
        Vec p(n_cells);
        Vec fv(n_cells);
        for (long c = 0; c < n_cells; ++c) {
          p[c] = rng.uniform() < 0.3 ? rng.uniform() : 1e-4;
          fv[c] = rng.uniform() * 5.0;
        }
        p /= p.sum();
        pi[static_cast<std::size_t>(s)] = p;
        f[static_cast<std::size_t>(s)] = fv;
      }
      double lhs = 0.0;
      double unif = 0.0;
      for (int s = 0; s < n_states; ++s) {
        for (long c = 0; c < n_cells; ++c) {
          lhs += rho[s] * pi[static_cast<std::size_t>(s)][c] *
                 f[static_cast<std::size_t>(s)][c];
          unif += rho[s] * f[static_cast<std::size_t>(s)][c] /
                  static_cast<double>(n_cells);
        }
      }
      DiscreteIsRow row;
      row.g = g;
      row.pair_index = pair;
      row.lhs = lhs;
      row.rhs = static_cast<double>(n_cells) * unif;
      row.holds = row.lhs <= row.rhs + 1e-12;
      if (!row.holds) ++suite.violations;
      suite.rows.push_back(row);
    }
  }
  return suite;
}

CertificateSuite run_certificate_suite(const std::vector<std::uint64_t>& seeds,
                                       int grid_resolution) {
  CertificateSuite suite;
  bool all_hold = true;
  for (std::uint64_t seed : seeds) {
    EnvConfig config;
    config.seed = seed;
    LowRankMDP env = make_smooth_lowrank_mdp(config);
    HypothesisClass cls = make_hypothesis_class(env, config);
    SmoothnessProfile profile = smoothness_certificate(cls, env, grid_resolution);
    CertificateRow row;
    row.seed = seed;
    row.l_phi = profile.l_phi;
    row.l_e = profile.l_e;
    row.l_e_cap = 2.0 * env.rank() * profile.l_phi;
    row.holds = row.l_e <= row.l_e_cap + 1e-9;
    all_hold = all_hold && row.holds;
    suite.rows.push_back(row);
  }
  suite.all_hold = all_hold;
  return suite;
}

}  // namespace flambe
