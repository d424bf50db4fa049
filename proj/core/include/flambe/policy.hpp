#pragma once

#include "flambe/common.hpp"
#include "flambe/quadrature.hpp"

#include <functional>
#include <memory>

namespace flambe {

enum class PolicyKind {
  GridMixture,
  Deterministic,
  Smoothed,
  UniformRandom,
  FiniteMixture,
  UniformTail,
};

const char* to_string(PolicyKind kind);

/**
 * Time-indexed action distribution per state.
 *
 * Densities are with respect to the Lebesgue measure on [0,1]^m, so the
 * uniform-random policy has density 1 and a grid mixture with per-cell
 * probability p has density p * G^m.
 *
 * FiniteMixture mixes at the trajectory level: a component is drawn once
 * per episode and followed throughout. Its per-step law is therefore
 * undefined and callers must decompose with for_each_component; all
 * evaluation routines in this library do so.
 */
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyKind kind() const = 0;
  virtual int action_dim() const = 0;

  // Number of steps the policy is defined for; kAnyHorizon means every
  // step (state-independent kinds such as uniform random).
  static constexpr int kAnyHorizon = -1;
  virtual int horizon() const = 0;

  virtual Action sample(int h, int s, Rng& rng) const = 0;

  // Density at (h, s, a); +infinity for deterministic policies.
  virtual double density(int h, int s,
                         const Eigen::Ref<const Action>& a) const = 0;

  // Upper bound on sup_{h,s,a} density; this is the K of the restricted
  // policy class. Exact for grid mixtures and smoothed deterministic
  // policies, +infinity for deterministic ones.
  virtual double max_density() const = 0;

  // Invoke fn(a, w) over a quadrature decomposition of the action law at
  // (h, s), with weights summing to 1. Exact for grid mixtures whenever
  // `grid` refines the policy's own grid; midpoint quadrature otherwise.
  virtual void visit(
      int h, int s, const QuadratureGrid& grid,
      const std::function<void(const Action&, double)>& fn) const = 0;

 protected:
  void check_step(int h, int s) const;
};

using PolicyPtr = std::shared_ptr<const Policy>;

class GridMixturePolicy final : public Policy {
 public:
  // table[h][s] holds g^m cell probabilities in flat cell order.
  GridMixturePolicy(int horizon, int n_states, int m, int g,
                    std::vector<std::vector<Vec>> table);

  static std::shared_ptr<const GridMixturePolicy> uniform(int horizon,
                                                          int n_states, int m,
                                                          int g);

  PolicyKind kind() const override { return PolicyKind::GridMixture; }
  int action_dim() const override { return grid_.m(); }
  int horizon() const override { return horizon_; }
  int n_states() const { return n_states_; }
  int g() const { return grid_.g(); }
  const QuadratureGrid& cells() const { return grid_; }
  const Vec& cell_probabilities(int h, int s) const;

  Action sample(int h, int s, Rng& rng) const override;
  double density(int h, int s,
                 const Eigen::Ref<const Action>& a) const override;
  double max_density() const override;
  void visit(int h, int s, const QuadratureGrid& grid,
             const std::function<void(const Action&, double)>& fn)
      const override;

 private:
  int horizon_;
  int n_states_;
  QuadratureGrid grid_;
  std::vector<std::vector<Vec>> table_;
};

class DeterministicPolicy final : public Policy {
 public:
  // actions[h][s] is the action taken at (h, s).
  DeterministicPolicy(int m, std::vector<std::vector<Action>> actions);

  PolicyKind kind() const override { return PolicyKind::Deterministic; }
  int action_dim() const override { return m_; }
  int horizon() const override { return static_cast<int>(actions_.size()); }
  int n_states() const { return static_cast<int>(actions_[0].size()); }
  const Action& action(int h, int s) const;

  Action sample(int h, int s, Rng& rng) const override;
  double density(int h, int s,
                 const Eigen::Ref<const Action>& a) const override;
  double max_density() const override;
  void visit(int h, int s, const QuadratureGrid& grid,
             const std::function<void(const Action&, double)>& fn)
      const override;

 private:
  int m_;
  std::vector<std::vector<Action>> actions_;
};

class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(int m) : m_(m) {
    require(m >= 1, "UniformRandomPolicy: m must be >= 1");
  }

  PolicyKind kind() const override { return PolicyKind::UniformRandom; }
  int action_dim() const override { return m_; }
  int horizon() const override { return kAnyHorizon; }

  Action sample(int h, int s, Rng& rng) const override;
  double density(int h, int s,
                 const Eigen::Ref<const Action>& a) const override;
  double max_density() const override { return 1.0; }
  void visit(int h, int s, const QuadratureGrid& grid,
             const std::function<void(const Action&, double)>& fn)
      const override;

 private:
  int m_;
};

/**
 * Box-kernel smoothing of a base policy: draw a' from the base, then a
 * uniformly on the l_inf ball of radius K^{-1/m}/2 around a', intersected
 * with the cube and renormalized per a'. Interior points keep density at
 * most K; near the boundary the per-a' renormalization can push the
 * density up to 2^m K, which max_density() accounts for (K_eff).
 */
class SmoothedPolicy final : public Policy {
 public:
  SmoothedPolicy(PolicyPtr base, double k);

  PolicyKind kind() const override { return PolicyKind::Smoothed; }
  int action_dim() const override { return base_->action_dim(); }
  int horizon() const override { return base_->horizon(); }
  double k() const { return k_; }
  double box_side() const { return width_; }
  const Policy& base() const { return *base_; }
  PolicyPtr base_ptr() const { return base_; }

  Action sample(int h, int s, Rng& rng) const override;
  double density(int h, int s,
                 const Eigen::Ref<const Action>& a) const override;
  double max_density() const override;
  void visit(int h, int s, const QuadratureGrid& grid,
             const std::function<void(const Action&, double)>& fn)
      const override;

 private:
  void box_bounds(const Eigen::Ref<const Action>& center,
                  Eigen::Ref<Action> lo, Eigen::Ref<Action> hi) const;

  PolicyPtr base_;
  double k_;
  double width_;  // K^{-1/m}
};

// Follow `base` before `uniform_from`, take uniformly random actions from
// that step onwards. This is the "augment with random actions" composition
// used by the outer loop's exploratory mixture.
class UniformTailPolicy final : public Policy {
 public:
  UniformTailPolicy(PolicyPtr base, int uniform_from);

  PolicyKind kind() const override { return PolicyKind::UniformTail; }
  int action_dim() const override { return base_->action_dim(); }
  int horizon() const override { return kAnyHorizon; }
  int uniform_from() const { return uniform_from_; }
  const Policy& base() const { return *base_; }
  PolicyPtr base_ptr() const { return base_; }

  Action sample(int h, int s, Rng& rng) const override;
  double density(int h, int s,
                 const Eigen::Ref<const Action>& a) const override;
  double max_density() const override;
  void visit(int h, int s, const QuadratureGrid& grid,
             const std::function<void(const Action&, double)>& fn)
      const override;

 private:
  PolicyPtr base_;
  int uniform_from_;
};

class FiniteMixturePolicy final : public Policy {
 public:
  // Nested mixtures are flattened on construction; weights must be
  // nonnegative and sum to 1 within 1e-12.
  FiniteMixturePolicy(std::vector<PolicyPtr> components,
                      std::vector<double> weights);

  static std::shared_ptr<const FiniteMixturePolicy> uniform_over(
      std::vector<PolicyPtr> components);

  PolicyKind kind() const override { return PolicyKind::FiniteMixture; }
  int action_dim() const override { return components_[0]->action_dim(); }
  int horizon() const override;

  std::size_t n_components() const { return components_.size(); }
  const PolicyPtr& component(std::size_t i) const { return components_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Trajectory-level mixture; per-step law is undefined.
  Action sample(int h, int s, Rng& rng) const override;
  double density(int h, int s,
                 const Eigen::Ref<const Action>& a) const override;
  double max_density() const override;
  void visit(int h, int s, const QuadratureGrid& grid,
             const std::function<void(const Action&, double)>& fn)
      const override;

  int sample_component(Rng& rng) const;

 private:
  std::vector<PolicyPtr> components_;
  std::vector<double> weights_;
};

// Decomposes trajectory-level mixtures into (weight, component) pairs;
// non-mixtures yield themselves with weight 1.
void for_each_component(
    const Policy& policy,
    const std::function<void(double, const Policy&)>& fn);

// The pi_K construction: box-kernel smoothing with width parameter K >= 1.
// Mixture bases are smoothed component-wise.
PolicyPtr smooth_policy(PolicyPtr base, double k);

PolicyPtr make_uniform_tail(PolicyPtr base, int uniform_from);

}  // namespace flambe
