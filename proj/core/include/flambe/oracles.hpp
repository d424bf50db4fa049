#pragma once

#include "flambe/env_factory.hpp"
#include "flambe/mdp.hpp"

#include <iosfwd>

namespace flambe {

struct TransitionSample {
  int s;
  Action a;
  int s_next;
  int iteration;       // outer-loop iteration that collected it
  std::uint64_t seed;  // rollout seed
};

// Append-only per-step dataset of (s, a, s') triples.
class TransitionDataset {
 public:
  TransitionDataset(int step, int n_states, int m)
      : step_(step), n_states_(n_states), m_(m) {
    require(step >= 0 && n_states >= 1 && m >= 1,
            "TransitionDataset: bad shape");
  }

  int step() const { return step_; }
  int n_states() const { return n_states_; }
  int action_dim() const { return m_; }
  long size() const { return static_cast<long>(samples_.size()); }
  const std::vector<TransitionSample>& samples() const { return samples_; }

  void append(TransitionSample sample);

  // CSV with columns h,s,a_1..a_m,s_next,iter,seed.
  void write_csv(std::ostream& os, bool header = true) const;

 private:
  int step_;
  int n_states_;
  int m_;
  std::vector<TransitionSample> samples_;
};

struct MleResult {
  int phi_index = -1;
  int psi_index = -1;
  PhiPtr phi;
  Mat psi;
  double log_likelihood = 0.0;
};

/**
 * Exhaustive maximum-likelihood fit over the finite class: returns the
 * pair maximizing sum_i log(phi(s_i, a_i)^T psi(s'_i) + 1e-12), ties broken
 * by the lowest (phi index, psi index). Deterministic and permutation
 * invariant in the dataset.
 *
 * When the class carries the true pair for this step, the returned
 * likelihood is asserted to be at least the truth's (argmax property).
 */
MleResult mle_fit(const TransitionDataset& data, const HypothesisClass& cls);

// Floor added inside the log; guards clamped-to-zero densities.
inline constexpr double kMleLikelihoodFloor = 1e-12;

// Successor-state sampling oracle for a candidate model: draws
// s' ~ phi(s,a)^T psi(.), reproducibly from the rng stream.
int samp(const PhiMap& phi, const Mat& psi, int s,
         const Eigen::Ref<const Action>& a, Rng& rng);

}  // namespace flambe
