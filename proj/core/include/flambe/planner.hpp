#pragma once

#include "flambe/mdp.hpp"
#include "flambe/policy.hpp"
#include "flambe/smoothness.hpp"

namespace flambe {

enum class InnerOptimizer {
  GridSearch,  // argmax over grid-cell midpoints (default)
  Concave,     // projected coordinate ascent; needs concave embeddings and
               // nonnegative weight vectors, else falls back to GridSearch
};

struct PlannerConfig {
  double beta = 0.5;
  int grid_resolution = 32;
  InnerOptimizer optimizer = InnerOptimizer::GridSearch;
  // Optional class certificate used to certify the beta/2 optimization
  // slack; when absent the embedding smoothness is measured from the
  // model itself.
  const SmoothnessProfile* certificate = nullptr;
  std::uint64_t probe_seed = 17;  // post-halt spot-check policies
};

struct ObjectiveResult {
  PolicyPtr policy;      // deterministic policy on steps 0..h_tilde
  double objective = 0.0;
  // True when the grid is too coarse to certify that the grid argmax is
  // within beta/2 of the continuous supremum.
  bool uncertified_slack = false;
  // Upper bound on the objective's variation within one grid cell.
  double cell_variation_bound = 0.0;
  bool used_concave_fallback = false;
};

/**
 * One inner maximization of the exploration objective
 *   E[ phi_h(s_h, a_h)^T Sigma_inv phi_h(s_h, a_h) | pi, model ]
 * by exact backward dynamic programming over grid actions: terminal reward
 * phi^T Sigma_inv phi at step h_tilde, pure dynamics before. Ties between
 * grid cells break toward the lexicographically smallest cell index.
 */
ObjectiveResult optimize_elliptical_objective(const ModelEstimate& model,
                                              int h_tilde,
                                              const Mat& sigma_inv,
                                              const PlannerConfig& config,
                                              double beta_for_certificate);

// Exact objective of a fixed policy under the model (no optimization);
// used by the post-halt spot checks and the monotonicity properties.
double elliptical_objective_of_policy(const ModelEstimate& model, int h_tilde,
                                      const Mat& sigma_inv,
                                      const Policy& policy,
                                      const QuadratureGrid& grid);

// Second-moment matrix E[phi phi^T] of the step-h_tilde features under the
// model occupancy; symmetric PSD with trace at most 1.
Mat expected_feature_covariance(const ModelEstimate& model,
                                const Policy& policy, int h_tilde,
                                const QuadratureGrid& grid);

struct PlannerTraceRow {
  int t = 0;
  double objective = 0.0;
  double log_det_sigma = 0.0;
};

struct PlannerResult {
  PolicyPtr policy;  // uniform mixture over accepted iterations
  int iterations = 0;
  std::vector<PlannerTraceRow> trace;
  // Set when the objective was already below beta/2 at t = 1 and the
  // mixture would be empty; the uniform-random policy is returned instead.
  bool degenerate_mixture = false;
  bool uncertified_slack = false;
  Mat sigma_final;  // Sigma at halt (identity plus accepted covariances)
};

/**
 * Iterative exploration-mixture construction: repeatedly add the policy
 * maximizing the elliptical objective against Sigma_{t-1}^{-1}, halt once
 * the achieved objective drops below beta/2, and return the uniform
 * mixture of the accepted policies.
 *
 * Accepted iterations never exceed ceil(8 d log(1 + 8/beta) / beta);
 * exceeding the bound is an invariant violation. After halting, the
 * objective of 32 random grid policies against Sigma_final^{-1} is
 * spot-checked to be at most beta (and at most T beta against
 * (Sigma_rho + I/T)^{-1}).
 */
PlannerResult elliptical_plan(const ModelEstimate& model, int h_tilde,
                              const PlannerConfig& config);

// The termination bound ceil(8 d log(1 + 8/beta) / beta).
long planner_iteration_cap(int d, double beta);

}  // namespace flambe
