#pragma once

#include "flambe/mdp.hpp"
#include "flambe/smoothness.hpp"

namespace flambe {

struct EnvConfig {
  int n_states = 3;
  int d = 2;
  int m = 1;
  int horizon = 3;
  std::uint64_t seed = 7;

  // Target action smoothness of the true embeddings: the measured
  // Hölder-alpha constant of a -> phi(s,a) is scaled down to at most
  // l_target. alpha in (0,1]. l_target = 0 zeroes the action-frequency
  // weights entirely (phi constant in a).
  double alpha = 1.0;
  double l_target = 2.0;

  // Hypothesis-class decoys.
  int n_phi_decoys = 4;
  int n_psi_decoys = 4;
  double decoy_scale = 0.3;
  // Regenerate decoys whose mean probe TV separation from the truth falls
  // below this floor (the < 1e-6 identity check always applies).
  double decoy_min_tv_sep = 0.0;

  // One independent truth per step instead of a time-homogeneous one.
  bool per_step_truth = false;

  void validate() const;
};

/**
 * Builds a low-rank MDP whose true embeddings are simplex-valued cosine
 * features (softplus-normalized), so both normalization conditions hold by
 * construction and psi columns are mixture components over states. The
 * finite-difference Hölder constant of a -> phi(s, a) on a 256-point probe
 * grid per dimension is at most l_target * (1 + 1e-3).
 */
LowRankMDP make_smooth_lowrank_mdp(const EnvConfig& config);

/**
 * Finite hypothesis class Phi x Psi containing the true embeddings
 * (realizability holds by construction and is asserted) plus seeded decoys
 * built by perturbing the truth's parameters. Every candidate pair induces
 * valid transition densities.
 */
class HypothesisClass {
 public:
  HypothesisClass(std::vector<PhiPtr> phis, std::vector<Mat> psis,
                  std::vector<int> true_phi_index,
                  std::vector<int> true_psi_index, double min_tv_separation);

  const std::vector<PhiPtr>& phis() const { return phis_; }
  const std::vector<Mat>& psis() const { return psis_; }
  std::size_t n_phi() const { return phis_.size(); }
  std::size_t n_psi() const { return psis_.size(); }

  int horizon() const { return static_cast<int>(true_phi_.size()); }

  int true_phi_index(int h) const {
    require(h >= 0 && h < horizon(), "HypothesisClass: step out of range");
    return true_phi_[static_cast<std::size_t>(h)];
  }
  int true_psi_index(int h) const {
    require(h >= 0 && h < horizon(), "HypothesisClass: step out of range");
    return true_psi_[static_cast<std::size_t>(h)];
  }

  // Smallest mean probe-point TV distance between the true model and any
  // decoy, measured at class construction.
  double min_tv_separation() const { return min_tv_separation_; }

 private:
  std::vector<PhiPtr> phis_;
  std::vector<Mat> psis_;
  std::vector<int> true_phi_;
  std::vector<int> true_psi_;
  double min_tv_separation_;
};

HypothesisClass make_hypothesis_class(const LowRankMDP& mdp,
                                      const EnvConfig& config);

/**
 * Numerical smoothness certificate over the whole class:
 *   l_phi — max over phi in Phi and states of the Hölder-alpha constant of
 *           a -> phi(s, a),
 *   l_t   — TV-continuity constant of the true transitions,
 *   l_e   — Hölder constant of the TV error functional
 *           a -> TV(phi(s,a)^T psi(.), phi*(s,a)^T psi*(.)) over all
 *           candidate pairs,
 * measured on a grid with `grid_resolution` points per action dimension.
 * Asserts l_e <= 2 d l_phi (the class-wide error-smoothness bound with
 * U = d for nonnegative embeddings).
 */
SmoothnessProfile smoothness_certificate(const HypothesisClass& cls,
                                         const LowRankMDP& mdp,
                                         int grid_resolution);

}  // namespace flambe
