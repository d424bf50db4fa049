#include "flambe/value.hpp"

#include <cmath>

namespace flambe {

namespace {

void check_policy_covers(const LowRankMDP& model, const Policy& policy) {
  require(policy.action_dim() == model.action_dim(),
          "policy/model action dimension mismatch");
  int hz = policy.horizon();
  if (hz != Policy::kAnyHorizon && hz < model.horizon()) {
    throw DomainError("policy is not defined for all model steps");
  }
}

double value_exact_single(const LowRankMDP& model, const Policy& policy,
                          const RewardFunction& reward,
                          const QuadratureGrid& grid) {
  const int n = model.n_states();
  const int horizon = model.horizon();
  Vec v_next = Vec::Zero(n);
  Vec v(n);
  for (int h = horizon - 1; h >= 0; --h) {
    for (int s = 0; s < n; ++s) {
      double acc = 0.0;
      policy.visit(h, s, grid, [&](const Action& a, double w) {
        double q = reward(h, s, a) + model.transition_density(h, s, a).dot(v_next);
        acc += w * q;
      });
      v[s] = acc;
    }
    v_next = v;
  }
  return model.rho().dot(v_next);
}

}  // namespace

double value_exact(const LowRankMDP& model, const Policy& policy,
                   const RewardFunction& reward, const QuadratureGrid& grid) {
  check_policy_covers(model, policy);
  require(reward.horizon() == model.horizon(),
          "reward/model horizon mismatch");
  require(grid.m() == model.action_dim(), "grid/model dimension mismatch");
  double total = 0.0;
  for_each_component(policy, [&](double w, const Policy& comp) {
    total += w * value_exact_single(model, comp, reward, grid);
  });
  return total;
}

namespace {

std::vector<Vec> occupancy_single(const LowRankMDP& model,
                                  const Policy& policy,
                                  const QuadratureGrid& grid, int n_steps) {
  const int n = model.n_states();
  std::vector<Vec> mu;
  mu.reserve(static_cast<std::size_t>(n_steps) + 1);
  mu.push_back(model.rho());
  for (int h = 0; h < n_steps; ++h) {
    Vec next = Vec::Zero(n);
    for (int s = 0; s < n; ++s) {
      if (mu.back()[s] == 0.0) continue;
      policy.visit(h, s, grid, [&](const Action& a, double w) {
        next += (mu.back()[s] * w) * model.transition_density(h, s, a);
      });
    }
    if (std::abs(next.sum() - 1.0) > 1e-9) {
      throw InvariantViolation("occupancy measure does not sum to 1");
    }
    mu.push_back(std::move(next));
  }
  return mu;
}

}  // namespace

std::vector<Vec> occupancy_prefix(const LowRankMDP& model,
                                  const Policy& policy,
                                  const QuadratureGrid& grid, int n_steps) {
  require(n_steps >= 0 && n_steps <= model.horizon(),
          "occupancy_prefix: step count out of range");
  int hz = policy.horizon();
  if (hz != Policy::kAnyHorizon && hz < n_steps) {
    throw DomainError("occupancy_prefix: policy does not cover the prefix");
  }
  std::vector<Vec> total(static_cast<std::size_t>(n_steps) + 1,
                         Vec::Zero(model.n_states()));
  for_each_component(policy, [&](double w, const Policy& comp) {
    auto mu = occupancy_single(model, comp, grid, n_steps);
    for (std::size_t i = 0; i < mu.size(); ++i) total[i] += w * mu[i];
  });
  return total;
}

std::vector<Vec> occupancy_exact(const LowRankMDP& model, const Policy& policy,
                                 const QuadratureGrid& grid) {
  check_policy_covers(model, policy);
  return occupancy_prefix(model, policy, grid, model.horizon());
}

Trajectory rollout(const LowRankMDP& mdp, const Policy& policy,
                   std::uint64_t seed) {
  check_policy_covers(mdp, policy);
  Rng rng = Rng::derived(seed, {0x7261ULL});

  const Policy* active = &policy;
  if (const auto* mix = dynamic_cast<const FiniteMixturePolicy*>(&policy)) {
    active = mix->component(static_cast<std::size_t>(mix->sample_component(rng)))
                 .get();
  }

  Trajectory traj;
  traj.seed = seed;
  traj.steps.reserve(static_cast<std::size_t>(mdp.horizon()));
  int s = rng.categorical(mdp.rho());
  for (int h = 0; h < mdp.horizon(); ++h) {
    Action a = active->sample(h, s, rng);
    Vec density = mdp.transition_density(h, s, a);
    int s_next = rng.categorical(density);
    traj.steps.push_back(TrajectoryStep{h, s, a, s_next});
    s = s_next;
  }
  return traj;
}

MonteCarloValue value_mc(const LowRankMDP& mdp, const Policy& policy,
                         const RewardFunction& reward, long n_traj,
                         std::uint64_t seed) {
  require(n_traj >= 1, "value_mc: n_traj must be >= 1");
  require(reward.horizon() == mdp.horizon(), "reward/model horizon mismatch");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < n_traj; ++i) {
    Trajectory traj =
        rollout(mdp, policy, derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    double ret = 0.0;
    for (const TrajectoryStep& step : traj.steps) {
      ret += reward(step.h, step.s, step.a);
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  MonteCarloValue out;
  out.n_traj = n_traj;
  out.estimate = sum / static_cast<double>(n_traj);
  if (n_traj > 1) {
    double var = (sum_sq - sum * sum / static_cast<double>(n_traj)) /
                 static_cast<double>(n_traj - 1);
    out.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(n_traj));
  }
  return out;
}

}  // namespace flambe
