#pragma once

#include "flambe/hyper.hpp"
#include "flambe/oracles.hpp"
#include "flambe/planner.hpp"
#include "flambe/value.hpp"

namespace flambe {

struct ProbePoint {
  int s;
  Action a;
};

// 64 fixed (s, a) probes per step, derived from (seed, step); held fixed
// across iterations so TV diagnostics are comparable.
std::vector<std::vector<ProbePoint>> make_probe_points(const LowRankMDP& env,
                                                       std::uint64_t seed,
                                                       int count = 64);

// Mean probe-point TV distance between the estimate and the environment
// at step h.
double probe_tv_mean(const LowRankMDP& env, const LowRankMDP& estimate, int h,
                     const std::vector<ProbePoint>& probes);

struct IterationDiagnostics {
  int iteration = 0;
  int h = 0;
  double tv_probe_mean = 0.0;
  int planner_iterations = 0;
  int chosen_phi_index = -1;
  int chosen_psi_index = -1;
  double log_likelihood = 0.0;
  bool planner_degenerate = false;
};

struct FlambeResult {
  ModelEstimate estimate;
  std::vector<IterationDiagnostics> diagnostics;
  std::vector<TransitionDataset> datasets;
  PolicyPtr final_mixture;
};

/**
 * The outer reward-free loop. Per iteration j and step h: collect n
 * (s_h, a_h, s_{h+1}) triples by rolling into s_h with the previous
 * exploratory mixture and taking a_h uniformly at random, append them to
 * D_h, refit the model by exhaustive MLE, and rebuild the exploratory
 * mixture from one planner call per step (policies augmented with uniform
 * actions from their step onwards).
 *
 * Fully deterministic given (env, class, hyper, planner, seed).
 */
FlambeResult run_flambe(const LowRankMDP& env, const HypothesisClass& cls,
                        const HyperParams& hyper, const PlannerConfig& planner,
                        std::uint64_t seed);

struct EvalGapRow {
  int reward_index = 0;
  int policy_index = 0;
  double value_env = 0.0;
  double value_model = 0.0;
  double gap = 0.0;
};

struct EvalGapResult {
  double max_gap = 0.0;
  std::vector<EvalGapRow> table;
};

/**
 * |V(pi; R, estimate) - V(pi; R, env)| for every (reward, policy) pair by
 * exact evaluation under both models. Rewards must be sparse; the
 * restricted-policy guarantee is stated for sparse rewards only.
 */
EvalGapResult model_eval_gap(const LowRankMDP& env,
                             const ModelEstimate& estimate,
                             const std::vector<RewardFunction>& rewards,
                             const std::vector<PolicyPtr>& policies,
                             const QuadratureGrid& grid);

// Evaluation families used by the CLI and the acceptance suite: seeded
// single-step sparse rewards with Hölder metadata, and a policy battery of
// grid mixtures with max density <= density_cap plus smoothed deterministic
// policies at smoothing_k.
std::vector<RewardFunction> make_eval_rewards(const LowRankMDP& env, int count,
                                              std::uint64_t seed);
std::vector<PolicyPtr> make_eval_policies(const LowRankMDP& env, int count,
                                          int grid_resolution,
                                          double density_cap,
                                          double smoothing_k,
                                          std::uint64_t seed);

}  // namespace flambe
