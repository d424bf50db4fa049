#pragma once

#include "flambe/common.hpp"
#include "flambe/embedding.hpp"

#include <functional>
#include <optional>

namespace flambe {

/**
 * Finite-state episodic MDP over the action cube [0,1]^m whose transitions
 * factorize through rank-d embeddings:
 *
 *   T_h(s' | s, a) = phi_h(s, a)^T psi_h(s')
 *
 * psi_h is stored as an |S| x d matrix whose row s' is psi_h(s').
 * Construction verifies the normalization conditions:
 *   - ||phi_h(s,a)||_2 <= 1 on an action probe grid,
 *   - ||sum_s' g(s') psi_h(s')||_2 <= sqrt(d) for indicator-style weights
 *     g in [0,1]^|S| (all 2^|S| vertices when |S| <= 12, otherwise 10^4
 *     seeded random vertices),
 *   - every probed density is entrywise >= -1e-12 and sums to 1 +- 1e-9,
 *   - rho sums to 1 within 1e-12 with nonnegative entries.
 *
 * The same type represents both ground-truth environments and learned
 * models; both must satisfy the same validity checks.
 */
class LowRankMDP {
 public:
  LowRankMDP(int m, int d, int horizon, Vec rho, std::vector<PhiPtr> phi,
             std::vector<Mat> psi);

  int n_states() const { return n_states_; }
  int action_dim() const { return m_; }
  int rank() const { return d_; }
  int horizon() const { return horizon_; }
  const Vec& rho() const { return rho_; }

  const PhiMap& phi(int h) const { return *phi_[static_cast<std::size_t>(h)]; }
  PhiPtr phi_ptr(int h) const { return phi_[static_cast<std::size_t>(h)]; }
  const Mat& psi(int h) const { return psi_[static_cast<std::size_t>(h)]; }

  // Probability vector over successor states; tiny negatives (>= -1e-12)
  // are clamped and the result renormalized. Violations beyond tolerance
  // raise InvariantViolation naming (h, s, a).
  Vec transition_density(int h, int s, const Eigen::Ref<const Action>& a) const;

 private:
  void validate() const;

  int n_states_;
  int m_;
  int d_;
  int horizon_;
  Vec rho_;
  std::vector<PhiPtr> phi_;
  std::vector<Mat> psi_;
};

// Learned model assembled by the outer loop, plus fit provenance.
struct ModelEstimate {
  LowRankMDP model;
  int iteration = 0;
  std::vector<long> dataset_sizes;
  std::vector<int> phi_indices;
  std::vector<int> psi_indices;
};

struct HolderMeta {
  double alpha = 1.0;  // exponent in (0, 1]
  double l = 0.0;      // Hölder constant
};

// Per-step reward (h, s, a) -> [0,1]. The single-step constructor is the
// canonical way to build sparse rewards: only one step can pay, so the
// total value is at most 1 under every policy and every model.
class RewardFunction {
 public:
  using Fn = std::function<double(int h, int s, const Action& a)>;
  using StepFn = std::function<double(int s, const Action& a)>;

  RewardFunction(int horizon, Fn fn, bool sparse,
                 std::optional<HolderMeta> smoothness = std::nullopt);

  static RewardFunction single_step(int horizon, int step, StepFn fn,
                                    std::optional<HolderMeta> smoothness =
                                        std::nullopt);

  static RewardFunction zero(int horizon);

  double operator()(int h, int s, const Eigen::Ref<const Action>& a) const;

  int horizon() const { return horizon_; }
  bool sparse() const { return sparse_; }
  const std::optional<HolderMeta>& smoothness() const { return smoothness_; }

 private:
  int horizon_;
  Fn fn_;
  bool sparse_;
  std::optional<HolderMeta> smoothness_;
};

struct TrajectoryStep {
  int h;
  int s;
  Action a;
  int s_next;
};

// One full episode with its seed provenance; always exactly H steps.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::uint64_t seed = 0;
};

}  // namespace flambe
