#include "flambe/driver.hpp"

#include "flambe/distance.hpp"

#include <cmath>
#include <sstream>

namespace flambe {

namespace {

// Roll the environment forward to step h under the policy; returns s_h.
int roll_to_step(const LowRankMDP& env, const Policy& policy, int h,
                 Rng& rng) {
  const Policy* active = &policy;
  if (const auto* mix = dynamic_cast<const FiniteMixturePolicy*>(&policy)) {
    active = mix->component(static_cast<std::size_t>(mix->sample_component(rng)))
                 .get();
  }
  int s = rng.categorical(env.rho());
  for (int t = 0; t < h; ++t) {
    Action a = active->sample(t, s, rng);
    s = rng.categorical(env.transition_density(t, s, a));
  }
  return s;
}

LowRankMDP assemble_model(const LowRankMDP& env,
                          const std::vector<MleResult>& fits) {
  std::vector<PhiPtr> phi;
  std::vector<Mat> psi;
  for (const MleResult& fit : fits) {
    phi.push_back(fit.phi);
    psi.push_back(fit.psi);
  }
  return LowRankMDP(env.action_dim(), env.rank(), env.horizon(), env.rho(),
                    std::move(phi), std::move(psi));
}

}  // namespace

std::vector<std::vector<ProbePoint>> make_probe_points(const LowRankMDP& env,
                                                       std::uint64_t seed,
                                                       int count) {
  std::vector<std::vector<ProbePoint>> probes(
      static_cast<std::size_t>(env.horizon()));
  for (int h = 0; h < env.horizon(); ++h) {
    Rng rng = Rng::derived(seed, {0x70726f62ULL, static_cast<std::uint64_t>(h)});
    auto& row = probes[static_cast<std::size_t>(h)];
    row.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      row.push_back(
          ProbePoint{i % env.n_states(), rng.uniform_action(env.action_dim())});
    }
  }
  return probes;
}

double probe_tv_mean(const LowRankMDP& env, const LowRankMDP& estimate, int h,
                     const std::vector<ProbePoint>& probes) {
  double total = 0.0;
  for (const ProbePoint& p : probes) {
    total += tv_distance(estimate.transition_density(h, p.s, p.a),
                         env.transition_density(h, p.s, p.a));
  }
  return total / static_cast<double>(probes.size());
}

FlambeResult run_flambe(const LowRankMDP& env, const HypothesisClass& cls,
                        const HyperParams& hyper, const PlannerConfig& planner,
                        std::uint64_t seed) {
  require(hyper.n >= 1.0, "run_flambe: hyper.n must be >= 1");
  require(hyper.j_max >= 1.0, "run_flambe: hyper.j_max must be >= 1");
  require(cls.horizon() == env.horizon(),
          "run_flambe: class/env horizon mismatch");
  const long n = static_cast<long>(hyper.n);
  const long j_max = static_cast<long>(hyper.j_max);
  const int horizon = env.horizon();

  const auto probes = make_probe_points(env, seed);

  std::vector<TransitionDataset> datasets;
  datasets.reserve(static_cast<std::size_t>(horizon));
  for (int h = 0; h < horizon; ++h) {
    datasets.emplace_back(h, env.n_states(), env.action_dim());
  }

  PolicyPtr rho_prev = std::make_shared<UniformRandomPolicy>(env.action_dim());

  FlambeResult result{ModelEstimate{env, 0, {}, {}, {}}, {}, {}, nullptr};

  std::vector<MleResult> fits(static_cast<std::size_t>(horizon));
  for (long j = 1; j <= j_max; ++j) {
    // Data collection and refit, step by step.
    for (int h = 0; h < horizon; ++h) {
      for (long i = 0; i < n; ++i) {
        Rng rng = Rng::derived(
            seed, {0xdaULL, static_cast<std::uint64_t>(j),
                   static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(i)});
        int s = roll_to_step(env, *rho_prev, h, rng);
        Action a = rng.uniform_action(env.action_dim());
        int s_next = rng.categorical(env.transition_density(h, s, a));
        datasets[static_cast<std::size_t>(h)].append(TransitionSample{
            s, std::move(a), s_next, static_cast<int>(j), seed});
      }
      try {
        fits[static_cast<std::size_t>(h)] =
            mle_fit(datasets[static_cast<std::size_t>(h)], cls);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "run_flambe: MLE failed at iteration " << j << ", step " << h
           << ": " << e.what();
        throw NumericalError(os.str());
      }
    }

    LowRankMDP model = assemble_model(env, fits);
    ModelEstimate estimate{model, static_cast<int>(j), {}, {}, {}};
    for (int h = 0; h < horizon; ++h) {
      estimate.dataset_sizes.push_back(
          datasets[static_cast<std::size_t>(h)].size());
      estimate.phi_indices.push_back(fits[static_cast<std::size_t>(h)].phi_index);
      estimate.psi_indices.push_back(fits[static_cast<std::size_t>(h)].psi_index);
    }

    // One planner call per step; the step-h policy explores feature
    // directions of phi_{h-1} and takes uniform actions from h onwards.
    std::vector<PolicyPtr> components;
    components.reserve(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h) {
      IterationDiagnostics diag;
      diag.iteration = static_cast<int>(j);
      diag.h = h;
      diag.tv_probe_mean =
          probe_tv_mean(env, model, h, probes[static_cast<std::size_t>(h)]);
      diag.chosen_phi_index = fits[static_cast<std::size_t>(h)].phi_index;
      diag.chosen_psi_index = fits[static_cast<std::size_t>(h)].psi_index;
      diag.log_likelihood = fits[static_cast<std::size_t>(h)].log_likelihood;

      if (h == 0) {
        // No features to cover before the first transition; pure
        // exploration from the start.
        components.push_back(
            std::make_shared<UniformRandomPolicy>(env.action_dim()));
      } else {
        PlannerResult plan;
        try {
          plan = elliptical_plan(estimate, h - 1, planner);
        } catch (const std::exception& e) {
          std::ostringstream os;
          os << "run_flambe: planner failed at iteration " << j << ", step "
             << h << ": " << e.what();
          throw NumericalError(os.str());
        }
        diag.planner_iterations = plan.iterations;
        diag.planner_degenerate = plan.degenerate_mixture;
        components.push_back(make_uniform_tail(plan.policy, h));
      }
      result.diagnostics.push_back(diag);
    }
    rho_prev = FiniteMixturePolicy::uniform_over(std::move(components));
    result.estimate = std::move(estimate);
  }

  result.datasets = std::move(datasets);
  result.final_mixture = rho_prev;
  return result;
}

EvalGapResult model_eval_gap(const LowRankMDP& env,
                             const ModelEstimate& estimate,
                             const std::vector<RewardFunction>& rewards,
                             const std::vector<PolicyPtr>& policies,
                             const QuadratureGrid& grid) {
  require(!rewards.empty() && !policies.empty(),
          "model_eval_gap: empty reward or policy list");
  for (const RewardFunction& r : rewards) {
    if (!r.sparse()) {
      throw DomainError(
          "model_eval_gap: the guarantee is stated for sparse rewards only");
    }
  }

  EvalGapResult out;
  for (std::size_t ri = 0; ri < rewards.size(); ++ri) {
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
      EvalGapRow row;
      row.reward_index = static_cast<int>(ri);
      row.policy_index = static_cast<int>(pi);
      row.value_env = value_exact(env, *policies[pi], rewards[ri], grid);
      row.value_model =
          value_exact(estimate.model, *policies[pi], rewards[ri], grid);
      row.gap = std::abs(row.value_env - row.value_model);
      out.max_gap = std::max(out.max_gap, row.gap);
      out.table.push_back(row);
    }
  }
  return out;
}

std::vector<RewardFunction> make_eval_rewards(const LowRankMDP& env, int count,
                                              std::uint64_t seed) {
  constexpr double kPi = 3.14159265358979323846;
  std::vector<RewardFunction> rewards;
  rewards.reserve(static_cast<std::size_t>(count));
  const int m = env.action_dim();
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::derived(seed, {0x72ULL, static_cast<std::uint64_t>(i)});
    const int step = rng.uniform_int(env.horizon());
    // Per-state amplitude and phase on a unit-frequency sine ridge:
    // Lipschitz constant at most pi.
    Vec amp(env.n_states());
    Vec phase(env.n_states());
    for (int s = 0; s < env.n_states(); ++s) {
      amp[s] = 0.25 + 0.75 * rng.uniform();
      phase[s] = 2.0 * kPi * rng.uniform();
    }
    Vec direction(m);
    double norm = 0.0;
    for (int k = 0; k < m; ++k) {
      direction[k] = rng.normal();
      norm += direction[k] * direction[k];
    }
    direction /= std::sqrt(std::max(1e-12, norm));
    rewards.push_back(RewardFunction::single_step(
        env.horizon(), step,
        [amp, phase, direction](int s, const Action& a) {
          double u = direction.dot(a);
          return 0.5 * amp[s] * (1.0 + std::sin(2.0 * 3.14159265358979323846 * u + phase[s]));
        },
        HolderMeta{1.0, kPi}));
  }
  return rewards;
}

std::vector<PolicyPtr> make_eval_policies(const LowRankMDP& env, int count,
                                          int grid_resolution,
                                          double density_cap,
                                          double smoothing_k,
                                          std::uint64_t seed) {
  std::vector<PolicyPtr> policies;
  policies.reserve(static_cast<std::size_t>(count));
  const int m = env.action_dim();
  QuadratureGrid cells(m, grid_resolution);
  const long n_cells = cells.n_cells();

  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::derived(seed, {0x70ULL, static_cast<std::uint64_t>(i)});
    if (i % 2 == 0) {
      // Grid mixture supported on ceil(n_cells / density_cap) random
      // cells: density exactly n_cells / |support| <= density_cap.
      long support = static_cast<long>(
          std::ceil(static_cast<double>(n_cells) / density_cap));
      std::vector<std::vector<Vec>> table(
          static_cast<std::size_t>(env.horizon()),
          std::vector<Vec>(static_cast<std::size_t>(env.n_states())));
      for (int h = 0; h < env.horizon(); ++h) {
        for (int s = 0; s < env.n_states(); ++s) {
          Vec p = Vec::Zero(n_cells);
          // sample `support` distinct cells by partial shuffle
          std::vector<long> idx(static_cast<std::size_t>(n_cells));
          for (long c = 0; c < n_cells; ++c) idx[static_cast<std::size_t>(c)] = c;
          for (long c = 0; c < support; ++c) {
            long pick = c + rng.uniform_int(static_cast<int>(n_cells - c));
            std::swap(idx[static_cast<std::size_t>(c)],
                      idx[static_cast<std::size_t>(pick)]);
          }
          for (long c = 0; c < support; ++c) {
            p[idx[static_cast<std::size_t>(c)]] =
                1.0 / static_cast<double>(support);
          }
          table[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] = p;
        }
      }
      policies.push_back(std::make_shared<GridMixturePolicy>(
          env.horizon(), env.n_states(), m, grid_resolution, std::move(table)));
    } else {
      // Smoothed deterministic policy with random per-(h, s) actions.
      std::vector<std::vector<Action>> actions(
          static_cast<std::size_t>(env.horizon()),
          std::vector<Action>(static_cast<std::size_t>(env.n_states())));
      for (int h = 0; h < env.horizon(); ++h) {
        for (int s = 0; s < env.n_states(); ++s) {
          actions[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] =
              rng.uniform_action(m);
        }
      }
      policies.push_back(smooth_policy(
          std::make_shared<DeterministicPolicy>(m, std::move(actions)),
          smoothing_k));
    }
  }
  return policies;
}

}  // namespace flambe
