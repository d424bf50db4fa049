#include "flambe/planner.hpp"

#include "flambe/value.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace flambe {

namespace {

void check_sigma_inv(const Mat& sigma_inv, int d) {
  require(sigma_inv.rows() == d && sigma_inv.cols() == d,
          "planner: Sigma_inv must be d x d");
  if ((sigma_inv - sigma_inv.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw DomainError("planner: Sigma_inv is not symmetric");
  }
}

void check_h_tilde(const LowRankMDP& model, int h_tilde) {
  require(h_tilde >= 0 && h_tilde < model.horizon(),
          "planner: model does not define steps 0..h_tilde");
}

double quadratic_form(const PhiMap& phi, const Mat& sigma_inv, int s,
                      const Action& a, Vec& scratch) {
  phi.eval(s, a, scratch);
  return scratch.dot(sigma_inv * scratch);
}

// Ternary search for the maximum of a concave 1-d slice.
double concave_line_search(const std::function<double(double)>& f) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

long planner_iteration_cap(int d, double beta) {
  return static_cast<long>(
      std::ceil(8.0 * d * std::log(1.0 + 8.0 / beta) / beta));
}

ObjectiveResult optimize_elliptical_objective(const ModelEstimate& model,
                                              int h_tilde,
                                              const Mat& sigma_inv,
                                              const PlannerConfig& config,
                                              double beta_for_certificate) {
  const LowRankMDP& mdp = model.model;
  check_h_tilde(mdp, h_tilde);
  check_sigma_inv(sigma_inv, mdp.rank());

  const int n = mdp.n_states();
  const int m = mdp.action_dim();
  QuadratureGrid grid(m, config.grid_resolution);

  ObjectiveResult out;
  Vec feat(mdp.rank());

  std::vector<std::vector<Action>> actions(
      static_cast<std::size_t>(h_tilde) + 1,
      std::vector<Action>(static_cast<std::size_t>(n)));
  Vec v_next(n);
  Vec v(n);

  for (int h = h_tilde; h >= 0; --h) {
    const bool terminal = h == h_tilde;
    auto q_at = [&](int s, const Action& a) {
      if (terminal) return quadratic_form(mdp.phi(h), sigma_inv, s, a, feat);
      return mdp.transition_density(h, s, a).dot(v_next);
    };

    // Concave route: valid for the linear backup steps when the embedding
    // is concave and the weight vector is entrywise nonnegative.
    bool concave_ok = false;
    if (config.optimizer == InnerOptimizer::Concave && !terminal &&
        mdp.phi(h).concave_in_action()) {
      Vec w = mdp.psi(h).transpose() * v_next;
      concave_ok = (w.array() >= 0.0).all();
    }
    if (config.optimizer == InnerOptimizer::Concave && !concave_ok) {
      out.used_concave_fallback = true;
    }

    for (int s = 0; s < n; ++s) {
      if (concave_ok) {
        // Projected coordinate ascent with exact line maxima.
        Action a = Action::Constant(m, 0.5);
        for (int sweep = 0; sweep < 4; ++sweep) {
          for (int k = 0; k < m; ++k) {
            a[k] = concave_line_search([&](double x) {
              Action probe = a;
              probe[k] = x;
              return q_at(s, probe);
            });
          }
        }
        actions[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] = a;
        v[s] = q_at(s, a);
      } else {
        double best = -std::numeric_limits<double>::infinity();
        long best_cell = 0;
        for (long c = 0; c < grid.n_cells(); ++c) {
          double q = q_at(s, grid.midpoint(c));
          if (q > best) {  // first maximum wins: lexicographic tie-break
            best = q;
            best_cell = c;
          }
        }
        actions[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] =
            grid.midpoint(best_cell);
        v[s] = best;
      }
    }
    v_next = v;
  }

  out.objective = mdp.rho().dot(v_next);
  out.policy = std::make_shared<DeterministicPolicy>(m, std::move(actions));

  // Certify that the grid argmax is within beta/2 of the continuous sup:
  // the achievable loss is at most the summed per-cell objective variation,
  // bounded through the embedding smoothness.
  {
    double l_phi;
    double alpha = 1.0;
    if (config.certificate != nullptr) {
      l_phi = config.certificate->l_phi;
      alpha = std::min(1.0, config.certificate->alpha_t);
    } else {
      QuadratureGrid probe(m, std::max(16, config.grid_resolution));
      l_phi = 0.0;
      for (int h = 0; h <= h_tilde; ++h) {
        for (int s = 0; s < n; ++s) {
          l_phi = std::max(
              l_phi, holder_quotient_estimate_vec(
                         probe,
                         [&](const Action& a) { return mdp.phi(h)(s, a); },
                         1.0));
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(sigma_inv);
    double lam_max = eig.eigenvalues().maxCoeff();
    double diam = std::sqrt(static_cast<double>(m)) / config.grid_resolution;
    out.cell_variation_bound = lam_max * l_phi *
                               (2.0 + h_tilde * static_cast<double>(mdp.rank())) *
                               std::pow(diam, alpha);
    out.uncertified_slack =
        out.cell_variation_bound >= beta_for_certificate / 2.0;
  }

  return out;
}

double elliptical_objective_of_policy(const ModelEstimate& model, int h_tilde,
                                      const Mat& sigma_inv,
                                      const Policy& policy,
                                      const QuadratureGrid& grid) {
  const LowRankMDP& mdp = model.model;
  check_h_tilde(mdp, h_tilde);
  check_sigma_inv(sigma_inv, mdp.rank());

  double total = 0.0;
  for_each_component(policy, [&](double weight, const Policy& comp) {
    auto mu = occupancy_prefix(mdp, comp, grid, h_tilde);
    Vec feat(mdp.rank());
    double obj = 0.0;
    for (int s = 0; s < mdp.n_states(); ++s) {
      if (mu.back()[s] == 0.0) continue;
      double e = 0.0;
      comp.visit(h_tilde, s, grid, [&](const Action& a, double w) {
        e += w * quadratic_form(mdp.phi(h_tilde), sigma_inv, s, a, feat);
      });
      obj += mu.back()[s] * e;
    }
    total += weight * obj;
  });
  return total;
}

Mat expected_feature_covariance(const ModelEstimate& model,
                                const Policy& policy, int h_tilde,
                                const QuadratureGrid& grid) {
  const LowRankMDP& mdp = model.model;
  check_h_tilde(mdp, h_tilde);

  const int d = mdp.rank();
  Mat second_moment = Mat::Zero(d, d);
  for_each_component(policy, [&](double weight, const Policy& comp) {
    auto mu = occupancy_prefix(mdp, comp, grid, h_tilde);
    Vec feat(d);
    for (int s = 0; s < mdp.n_states(); ++s) {
      if (mu.back()[s] == 0.0) continue;
      comp.visit(h_tilde, s, grid, [&](const Action& a, double w) {
        mdp.phi(h_tilde).eval(s, a, feat);
        second_moment += (weight * mu.back()[s] * w) * (feat * feat.transpose());
      });
    }
  });

  // Exact symmetrization; the accumulation is symmetric up to rounding.
  second_moment = 0.5 * (second_moment + second_moment.transpose()).eval();
  if (second_moment.trace() > 1.0 + 1e-9) {
    throw InvariantViolation(
        "expected_feature_covariance: trace exceeds 1 (||phi|| > 1?)");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(second_moment);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw InvariantViolation("expected_feature_covariance: not PSD");
  }
  return second_moment;
}

PlannerResult elliptical_plan(const ModelEstimate& model, int h_tilde,
                              const PlannerConfig& config) {
  const LowRankMDP& mdp = model.model;
  check_h_tilde(mdp, h_tilde);
  require(config.beta > 0.0 && config.beta <= 8.0,
          "elliptical_plan: beta must be in (0, 8]");

  const int d = mdp.rank();
  const double beta = config.beta;
  const long cap = planner_iteration_cap(d, beta);
  QuadratureGrid grid(mdp.action_dim(), config.grid_resolution);

  PlannerResult result;
  Mat sigma = Mat::Identity(d, d);
  std::vector<PolicyPtr> accepted;

  auto log_det = [](const Mat& matrix) {
    Eigen::LLT<Mat> llt(matrix);
    double v = 0.0;
    for (int i = 0; i < matrix.rows(); ++i) {
      v += 2.0 * std::log(llt.matrixL()(i, i));
    }
    return v;
  };

  bool halted = false;
  for (long t = 1; t <= cap + 1; ++t) {
    Mat sigma_inv = sigma.llt().solve(Mat::Identity(d, d));
    sigma_inv = 0.5 * (sigma_inv + sigma_inv.transpose()).eval();
    ObjectiveResult step = optimize_elliptical_objective(
        model, h_tilde, sigma_inv, config, beta);
    result.uncertified_slack |= step.uncertified_slack;

    if (step.objective < beta / 2.0) {
      result.trace.push_back(
          PlannerTraceRow{static_cast<int>(t), step.objective, log_det(sigma)});
      halted = true;
      break;
    }
    if (t == cap + 1) break;  // accepted-count bound exceeded

    Mat cov = expected_feature_covariance(model, *step.policy, h_tilde, grid);
    sigma += cov;
    accepted.push_back(step.policy);
    result.trace.push_back(
        PlannerTraceRow{static_cast<int>(t), step.objective, log_det(sigma)});
  }

  if (!halted) {
    throw InvariantViolation(
        "elliptical_plan: objective stayed above beta/2 beyond the "
        "8 d log(1 + 8/beta) / beta iteration bound");
  }

  result.iterations = static_cast<int>(accepted.size());
  result.sigma_final = sigma;

  if (accepted.empty()) {
    result.degenerate_mixture = true;
    result.policy = std::make_shared<UniformRandomPolicy>(mdp.action_dim());
  } else {
    result.policy = FiniteMixturePolicy::uniform_over(accepted);
  }

  // Post-halt guarantee, spot-checked on random grid policies: every
  // policy's objective against Sigma_final^{-1} is at most beta, and
  // against (Sigma_rho + I/T)^{-1} at most T beta.
  {
    Mat sigma_inv = sigma.llt().solve(Mat::Identity(d, d));
    sigma_inv = 0.5 * (sigma_inv + sigma_inv.transpose()).eval();
    const long t_count = static_cast<long>(accepted.size());
    Mat scaled_inv;
    if (t_count > 0) {
      // (Sigma_rho + I/T)^{-1} = T Sigma_final^{-1} exactly.
      scaled_inv = static_cast<double>(t_count) * sigma_inv;
    }
    for (int probe = 0; probe < 32; ++probe) {
      Rng rng = Rng::derived(config.probe_seed,
                             {static_cast<std::uint64_t>(h_tilde),
                              static_cast<std::uint64_t>(probe)});
      std::vector<std::vector<Action>> actions(
          static_cast<std::size_t>(h_tilde) + 1,
          std::vector<Action>(static_cast<std::size_t>(mdp.n_states())));
      for (int h = 0; h <= h_tilde; ++h) {
        for (int s = 0; s < mdp.n_states(); ++s) {
          actions[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] =
              grid.midpoint(rng.uniform_int(static_cast<int>(grid.n_cells())));
        }
      }
      DeterministicPolicy pi(mdp.action_dim(), std::move(actions));
      double obj = elliptical_objective_of_policy(model, h_tilde, sigma_inv,
                                                  pi, grid);
      if (obj > beta + 1e-9) {
        throw InvariantViolation(
            "elliptical_plan: post-halt objective exceeds beta on a probe "
            "policy");
      }
      if (t_count > 0) {
        double scaled = elliptical_objective_of_policy(model, h_tilde,
                                                       scaled_inv, pi, grid);
        if (scaled > static_cast<double>(t_count) * beta + 1e-9) {
          throw InvariantViolation(
              "elliptical_plan: post-halt scaled objective exceeds T beta");
        }
      }
    }
  }

  return result;
}

}  // namespace flambe
