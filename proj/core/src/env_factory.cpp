#include "flambe/env_factory.hpp"

#include "flambe/distance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace flambe {

namespace {

constexpr int kProbeGrid = 256;  // per-dimension grid for Hölder scaling
constexpr int kSepProbes = 64;   // (s, a) probes for decoy separation

std::vector<Mat> random_cosine_weights(int n_states, int d, int m, Rng& rng) {
  std::vector<Mat> weights(static_cast<std::size_t>(n_states));
  for (int s = 0; s < n_states; ++s) {
    Mat w(d, m + 1);
    for (int i = 0; i < d; ++i) {
      w(i, 0) = rng.normal();
      for (int k = 0; k < m; ++k) w(i, 1 + k) = rng.normal();
    }
    weights[static_cast<std::size_t>(s)] = std::move(w);
  }
  return weights;
}

// Column-stochastic |S| x d matrix: column i is a mixture component over
// states, drawn from a flat Dirichlet via exponential spacings.
Mat random_mixture_columns(int n_states, int d, Rng& rng) {
  Mat psi(n_states, d);
  for (int i = 0; i < d; ++i) {
    double total = 0.0;
    for (int s = 0; s < n_states; ++s) {
      double e = -std::log(std::max(1e-300, 1.0 - rng.uniform()));
      psi(s, i) = e;
      total += e;
    }
    psi.col(i) /= total;
  }
  return psi;
}

double measure_phi_holder(const PhiMap& phi, double alpha, int grid_res) {
  QuadratureGrid grid(phi.action_dim(), grid_res);
  double best = 0.0;
  for (int s = 0; s < phi.n_states(); ++s) {
    best = std::max(
        best, holder_quotient_estimate_vec(
                  grid, [&](const Action& a) { return phi(s, a); }, alpha));
  }
  return best;
}

// Scale the action-frequency weights so the measured Hölder constant is
// at most l_target. The constant is 0 at scale 0 and continuous in the
// scale, so bisection always lands.
std::shared_ptr<CosinePhi> scale_to_target(std::shared_ptr<CosinePhi> phi,
                                           double alpha, double l_target) {
  if (l_target < 0.0) {
    throw DomainError("env factory: l_target must be nonnegative");
  }
  if (l_target == 0.0) return phi->with_frequency_scale(0.0);
  double measured = measure_phi_holder(*phi, alpha, kProbeGrid);
  if (measured <= l_target) return phi;

  double lo = 0.0, hi = 1.0;
  std::shared_ptr<CosinePhi> best = phi->with_frequency_scale(0.0);
  for (int iter = 0; iter < 40; ++iter) {
    double mid = 0.5 * (lo + hi);
    auto candidate = phi->with_frequency_scale(mid);
    double l_mid = measure_phi_holder(*candidate, alpha, kProbeGrid);
    if (l_mid <= l_target) {
      lo = mid;
      best = candidate;
      if (l_mid >= 0.999 * l_target) break;
    } else {
      hi = mid;
    }
  }
  double achieved = measure_phi_holder(*best, alpha, kProbeGrid);
  if (achieved > l_target * (1.0 + 1e-3)) {
    std::ostringstream os;
    os << "env factory: could not certify smoothness scale " << l_target
       << " (achieved " << achieved << ")";
    throw NumericalError(os.str());
  }
  return best;
}

std::vector<std::pair<int, Action>> separation_probes(int n_states, int m,
                                                      std::uint64_t seed) {
  Rng rng = Rng::derived(seed, {0x70726fULL});
  std::vector<std::pair<int, Action>> probes;
  probes.reserve(kSepProbes);
  for (int i = 0; i < kSepProbes; ++i) {
    probes.emplace_back(i % n_states, rng.uniform_action(m));
  }
  return probes;
}

struct Separation {
  double mean = 0.0;
  double max = 0.0;
};

// TV distance between the candidate model (phi, psi) and the true model
// over the probe set, for the steps where the truth applies.
Separation probe_separation(const LowRankMDP& mdp, const PhiMap& phi,
                            const Mat& psi,
                            const std::vector<std::pair<int, Action>>& probes) {
  Separation sep;
  Vec feat(mdp.rank());
  long count = 0;
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (const auto& [s, a] : probes) {
      phi.eval(s, a, feat);
      Vec cand = psi * feat;
      for (int i = 0; i < cand.size(); ++i) cand[i] = std::max(0.0, cand[i]);
      cand /= cand.sum();
      double tv = tv_distance(cand, mdp.transition_density(h, s, a));
      sep.mean += tv;
      sep.max = std::max(sep.max, tv);
      ++count;
    }
  }
  sep.mean /= static_cast<double>(count);
  return sep;
}

}  // namespace

void EnvConfig::validate() const {
  require(n_states >= 1, "EnvConfig: n_states must be >= 1");
  require(d >= 1 && d <= n_states, "EnvConfig: need 1 <= d <= n_states");
  require(m >= 1, "EnvConfig: m must be >= 1");
  require(horizon >= 1, "EnvConfig: horizon must be >= 1");
  require(alpha > 0.0 && alpha <= 1.0, "EnvConfig: alpha must be in (0,1]");
  require(l_target >= 0.0, "EnvConfig: l_target must be >= 0");
  require(n_phi_decoys >= 0 && n_psi_decoys >= 0,
          "EnvConfig: decoy counts must be >= 0");
  require(decoy_scale >= 0.0, "EnvConfig: decoy scale must be >= 0");
}

LowRankMDP make_smooth_lowrank_mdp(const EnvConfig& config) {
  config.validate();
  Rng rng = Rng::derived(config.seed, {0x656e76ULL});

  Vec rho(config.n_states);
  {
    double total = 0.0;
    for (int s = 0; s < config.n_states; ++s) {
      rho[s] = -std::log(std::max(1e-300, 1.0 - rng.uniform()));
      total += rho[s];
    }
    rho /= total;
    // renormalize exactly so the 1e-12 constructor check is immune to
    // accumulated rounding
    rho /= rho.sum();
  }

  const int steps = config.per_step_truth ? config.horizon : 1;
  std::vector<PhiPtr> phi_blocks;
  std::vector<Mat> psi_blocks;
  for (int block = 0; block < steps; ++block) {
    auto raw = std::make_shared<CosinePhi>(
        config.d, config.m,
        random_cosine_weights(config.n_states, config.d, config.m, rng));
    phi_blocks.push_back(scale_to_target(raw, config.alpha, config.l_target));
    psi_blocks.push_back(random_mixture_columns(config.n_states, config.d, rng));
  }

  std::vector<PhiPtr> phi(static_cast<std::size_t>(config.horizon));
  std::vector<Mat> psi(static_cast<std::size_t>(config.horizon));
  for (int h = 0; h < config.horizon; ++h) {
    const std::size_t idx = config.per_step_truth ? static_cast<std::size_t>(h) : 0;
    phi[static_cast<std::size_t>(h)] = phi_blocks[idx];
    psi[static_cast<std::size_t>(h)] = psi_blocks[idx];
  }
  return LowRankMDP(config.m, config.d, config.horizon, std::move(rho),
                    std::move(phi), std::move(psi));
}

HypothesisClass::HypothesisClass(std::vector<PhiPtr> phis,
                                 std::vector<Mat> psis,
                                 std::vector<int> true_phi_index,
                                 std::vector<int> true_psi_index,
                                 double min_tv_separation)
    : phis_(std::move(phis)),
      psis_(std::move(psis)),
      true_phi_(std::move(true_phi_index)),
      true_psi_(std::move(true_psi_index)),
      min_tv_separation_(min_tv_separation) {
  require(!phis_.empty() && !psis_.empty(), "HypothesisClass: empty class");
  require(true_phi_.size() == true_psi_.size() && !true_phi_.empty(),
          "HypothesisClass: per-step truth indices required");
}

HypothesisClass make_hypothesis_class(const LowRankMDP& mdp,
                                      const EnvConfig& config) {
  const auto probes =
      separation_probes(mdp.n_states(), mdp.action_dim(), config.seed);

  std::vector<PhiPtr> phis;
  std::vector<Mat> psis;
  std::vector<int> true_phi(static_cast<std::size_t>(mdp.horizon()));
  std::vector<int> true_psi(static_cast<std::size_t>(mdp.horizon()));

  // The truth first: one shared block or one per step.
  for (int h = 0; h < mdp.horizon(); ++h) {
    PhiPtr p = mdp.phi_ptr(h);
    int idx = -1;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      if (phis[i].get() == p.get()) idx = static_cast<int>(i);
    }
    if (idx < 0) {
      idx = static_cast<int>(phis.size());
      phis.push_back(p);
    }
    true_phi[static_cast<std::size_t>(h)] = idx;

    const Mat& q = mdp.psi(h);
    int qidx = -1;
    for (std::size_t i = 0; i < psis.size(); ++i) {
      if (psis[i].rows() == q.rows() && psis[i] == q) qidx = static_cast<int>(i);
    }
    if (qidx < 0) {
      qidx = static_cast<int>(psis.size());
      psis.push_back(q);
    }
    true_psi[static_cast<std::size_t>(h)] = qidx;
  }

  const auto* true_cosine = dynamic_cast<const CosinePhi*>(&mdp.phi(0));
  require(true_cosine != nullptr,
          "make_hypothesis_class: factory classes require cosine embeddings");

  double min_sep = std::numeric_limits<double>::infinity();
  bool has_decoys = false;

  auto admit = [&](auto make_candidate, auto push) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = make_candidate(attempt);
      Separation sep = candidate.second;
      if (sep.max < 1e-6) continue;  // indistinguishable from the truth
      if (sep.mean < config.decoy_min_tv_sep) continue;
      push(candidate.first);
      min_sep = std::min(min_sep, sep.mean);
      has_decoys = true;
      return;
    }
    throw NumericalError(
        "make_hypothesis_class: decoy identical to truth after 100 attempts "
        "(perturbation scale too small?)");
  };

  for (int i = 0; i < config.n_phi_decoys; ++i) {
    admit(
        [&](int attempt) {
          Rng rng = Rng::derived(config.seed,
                                 {0xdecULL, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(attempt)});
          std::vector<Mat> weights = true_cosine->weights();
          for (Mat& w : weights) {
            for (int r = 0; r < w.rows(); ++r) {
              for (int c = 0; c < w.cols(); ++c) {
                w(r, c) += config.decoy_scale * rng.normal();
              }
            }
          }
          auto decoy = std::make_shared<CosinePhi>(
              mdp.rank(), mdp.action_dim(), std::move(weights));
          Separation sep = probe_separation(mdp, *decoy, mdp.psi(0), probes);
          return std::make_pair(PhiPtr(decoy), sep);
        },
        [&](const PhiPtr& p) { phis.push_back(p); });
  }

  for (int i = 0; i < config.n_psi_decoys; ++i) {
    admit(
        [&](int attempt) {
          Rng rng = Rng::derived(config.seed,
                                 {0xdecaULL, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(attempt)});
          // Multiplicative log-normal perturbation keeps columns strictly
          // positive; renormalizing keeps them mixture components.
          Mat q = mdp.psi(0);
          for (int c = 0; c < q.cols(); ++c) {
            for (int r = 0; r < q.rows(); ++r) {
              q(r, c) *= std::exp(config.decoy_scale * rng.normal());
            }
            q.col(c) /= q.col(c).sum();
          }
          Separation sep = probe_separation(mdp, mdp.phi(0), q, probes);
          return std::make_pair(q, sep);
        },
        [&](const Mat& q) { psis.push_back(q); });
  }

  // Realizability plus validity of every candidate pair, checked the same
  // way LowRankMDP checks its own densities.
  {
    Vec feat(mdp.rank());
    for (const PhiPtr& p : phis) {
      for (const Mat& q : psis) {
        for (const auto& [s, a] : probes) {
          p->eval(s, a, feat);
          Vec density = q * feat;
          double sum = 0.0;
          for (int j = 0; j < density.size(); ++j) {
            if (density[j] < -1e-12) {
              throw InvariantViolation(
                  "hypothesis class: candidate pair yields negative density");
            }
            sum += std::max(0.0, density[j]);
          }
          if (std::abs(sum - 1.0) > 1e-9) {
            throw InvariantViolation(
                "hypothesis class: candidate pair density does not normalize");
          }
        }
      }
    }
  }

  if (!has_decoys) min_sep = 0.0;
  return HypothesisClass(std::move(phis), std::move(psis), std::move(true_phi),
                         std::move(true_psi), min_sep);
}

SmoothnessProfile smoothness_certificate(const HypothesisClass& cls,
                                         const LowRankMDP& mdp,
                                         int grid_resolution) {
  require(grid_resolution >= 16,
          "smoothness_certificate: need >= 16 grid points per dimension");
  const int m = mdp.action_dim();
  const double alpha = 1.0;  // first-order certificate
  QuadratureGrid grid(m, grid_resolution);

  const auto tv = [](const Vec& a, const Vec& b) {
    return 0.5 * (a - b).lpNorm<1>();
  };
  const auto hellinger = [](const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) {
      double d = std::sqrt(std::max(0.0, a[i])) - std::sqrt(std::max(0.0, b[i]));
      s += d * d;
    }
    return std::sqrt(0.5 * s);
  };

  SmoothnessProfile profile;
  profile.m = m;
  profile.grid_resolution = grid_resolution;
  profile.alpha_e = alpha;
  profile.alpha_t = alpha;

  // (i) class-wide Hölder constant of the embeddings.
  double l_phi = 0.0;
  for (const PhiPtr& phi : cls.phis()) {
    for (int s = 0; s < phi->n_states(); ++s) {
      l_phi = std::max(
          l_phi,
          holder_quotient_estimate_vec(
              grid, [&](const Action& a) { return (*phi)(s, a); }, alpha));
    }
  }
  profile.l_phi = l_phi;

  // (ii) TV-continuity of the true transitions.
  double l_t = 0.0;
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int s = 0; s < mdp.n_states(); ++s) {
      l_t = std::max(l_t, holder_quotient_estimate_metric(
                              grid,
                              [&](const Action& a) {
                                return mdp.transition_density(h, s, a);
                              },
                              tv, alpha));
    }
  }
  profile.l_t = l_t;

  // (iii) smoothness of the error functional over every candidate pair,
  // against the true model at each step. The per-pair evaluation reuses
  // one tabulation of the candidate and true densities.
  std::vector<int> distinct_steps;
  {
    bool homogeneous = true;
    for (int h = 1; h < mdp.horizon(); ++h) {
      if (mdp.phi_ptr(h).get() != mdp.phi_ptr(0).get() ||
          mdp.psi(h) != mdp.psi(0)) {
        homogeneous = false;
        break;
      }
    }
    if (homogeneous) {
      distinct_steps.push_back(0);
    } else {
      for (int h = 0; h < mdp.horizon(); ++h) distinct_steps.push_back(h);
    }
  }

  double l_e = 0.0;
  double l_e_hellinger = 0.0;
  Vec feat(mdp.rank());
  for (const PhiPtr& phi : cls.phis()) {
    for (const Mat& psi : cls.psis()) {
      for (int h : distinct_steps) {
        for (int s = 0; s < mdp.n_states(); ++s) {
          auto candidate_density = [&](const Action& a) {
            phi->eval(s, a, feat);
            Vec density = psi * feat;
            for (int i = 0; i < density.size(); ++i) {
              density[i] = std::max(0.0, density[i]);
            }
            density /= density.sum();
            return density;
          };
          GridFunction err_tv = GridFunction::tabulate(grid, [&](const Action& a) {
            return tv(candidate_density(a), mdp.transition_density(h, s, a));
          });
          GridFunction err_h = GridFunction::tabulate(grid, [&](const Action& a) {
            return hellinger(candidate_density(a),
                             mdp.transition_density(h, s, a));
          });
          l_e = std::max(l_e, holder_quotient_estimate(err_tv, alpha));
          l_e_hellinger =
              std::max(l_e_hellinger, holder_quotient_estimate(err_h, alpha));
        }
      }
    }
  }
  profile.l_e = l_e;
  profile.l_e_hellinger = l_e_hellinger;

  // Class-wide error-smoothness bound with U = d for nonnegative
  // embeddings; holds pairwise on the measurement grid, so a violation
  // means a measurement bug.
  const double u = static_cast<double>(mdp.rank());
  if (profile.l_e > 2.0 * u * profile.l_phi + 1e-9) {
    throw InvariantViolation(
        "smoothness_certificate: l_e exceeds 2 U l_phi");
  }

  return profile;
}

}  // namespace flambe
