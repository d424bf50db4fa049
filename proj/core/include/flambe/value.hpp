#pragma once

#include "flambe/mdp.hpp"
#include "flambe/policy.hpp"
#include "flambe/quadrature.hpp"

namespace flambe {

/**
 * Exact value V(pi; R, model) by backward dynamic programming. The action
 * integral at each (h, s) is midpoint quadrature on `grid`; for grid-mixture
 * policies whose cells are refined by `grid` and rewards/transitions constant
 * on cells the result is exact, otherwise the quadrature error is
 * O(G^{-min(1, alpha)}).
 *
 * Trajectory-level mixtures are evaluated component-wise (the value is
 * linear in the mixture weights).
 */
double value_exact(const LowRankMDP& model, const Policy& policy,
                   const RewardFunction& reward, const QuadratureGrid& grid);

// State occupancy measures mu_0, ..., mu_H under the model and policy;
// mu_h sums to 1 within 1e-9 (checked). mu_0 = rho.
std::vector<Vec> occupancy_exact(const LowRankMDP& model, const Policy& policy,
                                 const QuadratureGrid& grid);

// Occupancies mu_0, ..., mu_{n_steps} only; the policy needs to cover
// steps 0..n_steps-1. Used when the policy is a planner prefix that is not
// defined for the full horizon.
std::vector<Vec> occupancy_prefix(const LowRankMDP& model,
                                  const Policy& policy,
                                  const QuadratureGrid& grid, int n_steps);

// One seeded episode: s_0 ~ rho, a_h ~ pi_h(. | s_h), s_{h+1} ~ T_h.
// Mixture policies draw their component once, up front.
Trajectory rollout(const LowRankMDP& mdp, const Policy& policy,
                   std::uint64_t seed);

struct MonteCarloValue {
  double estimate = 0.0;
  double stderr_ = 0.0;
  long n_traj = 0;
};

// Monte Carlo value estimate over n_traj seeded rollouts. Rollout i uses
// the stream derived from (seed, i), so any execution order gives
// bit-identical results.
MonteCarloValue value_mc(const LowRankMDP& mdp, const Policy& policy,
                         const RewardFunction& reward, long n_traj,
                         std::uint64_t seed);

}  // namespace flambe
