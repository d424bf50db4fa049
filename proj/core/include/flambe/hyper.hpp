#pragma once

#include "flambe/smoothness.hpp"

#include <optional>
#include <string>

namespace flambe {

enum class PolicyScope {
  RestrictedPolicy,    // evaluate policies with density at most a given K
  UnrestrictedPolicy,  // all policies; K is derived from reward/transition
                       // smoothness and epsilon is split in half
};

enum class HyperProvenance { Theoretical, Practical };

struct HyperInputs {
  double eps = 0.1;
  double delta = 0.05;
  SmoothnessProfile profile;
  int d = 2;
  int horizon = 3;
  double n_phi = 2;  // |Phi|
  double n_psi = 2;  // |Psi|
  PolicyScope scope = PolicyScope::RestrictedPolicy;
  double k = 1.0;          // density cap for RestrictedPolicy
  double c_theorem1 = 1.0; // interpolation constant; 1 for the first-order case
};

struct HyperParams {
  HyperProvenance provenance = HyperProvenance::Theoretical;

  double beta = 0.0;    // planner tolerance (the explicit beta' assignment)
  double eps_tv = 0.0;  // MLE transition-error target
  double lambda = 0.0;
  double n = 0.0;       // samples per (iteration, step)
  double j_max = 0.0;   // outer iterations
  double k = 0.0;       // policy density cap in force

  double tau = 0.0;
  double kappa = 0.0;
  double sigma = 0.0;
  double u = 0.0;  // c * L_E^kappa

  double trajectory_count = 0.0;  // n * j_max * H

  static HyperParams practical(double n, double j_max, double beta, double k);
};

/**
 * The exact hyperparameter assignments from the restricted-policy PAC
 * bound, computed in order U -> beta' -> eps_tv -> lambda -> J_max -> n.
 * In UnrestrictedPolicy scope, K = (8 sqrt(m) H L / eps)^sigma is fixed
 * first and eps is halved for the remaining assignments.
 *
 * The returned counts are astronomically large by design: this makes the
 * bound executable for scaling checks, not for running experiments.
 */
HyperParams theoretical_hyperparams(const HyperInputs& inputs);

// Same computation with the three log factors frozen to their values at
// the inputs of `reference`; used by the scaling studies.
HyperParams theoretical_hyperparams_frozen(const HyperInputs& inputs,
                                           const HyperInputs& reference);

}  // namespace flambe
