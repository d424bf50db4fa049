#include "flambe/oracles.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace flambe {

void TransitionDataset::append(TransitionSample sample) {
  require(sample.s >= 0 && sample.s < n_states_ && sample.s_next >= 0 &&
              sample.s_next < n_states_,
          "TransitionDataset: state out of range");
  require(sample.a.size() == m_ && in_unit_cube(sample.a),
          "TransitionDataset: action outside [0,1]^m");
  samples_.push_back(std::move(sample));
}

void TransitionDataset::write_csv(std::ostream& os, bool header) const {
  if (header) {
    os << "h,s";
    for (int k = 0; k < m_; ++k) os << ",a_" << (k + 1);
    os << ",s_next,iter,seed\n";
  }
  for (const TransitionSample& sample : samples_) {
    os << step_ << ',' << sample.s;
    for (int k = 0; k < m_; ++k) os << ',' << sample.a[k];
    os << ',' << sample.s_next << ',' << sample.iteration << ','
       << sample.seed << '\n';
  }
}

MleResult mle_fit(const TransitionDataset& data, const HypothesisClass& cls) {
  require(data.size() > 0, "mle_fit: empty dataset");

  MleResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();

  Vec feat;
  for (std::size_t i = 0; i < cls.n_phi(); ++i) {
    const PhiMap& phi = *cls.phis()[i];
    feat.resize(phi.dim());
    for (std::size_t j = 0; j < cls.n_psi(); ++j) {
      const Mat& psi = cls.psis()[j];
      double ll = 0.0;
      for (const TransitionSample& sample : data.samples()) {
        phi.eval(sample.s, sample.a, feat);
        double p = psi.row(sample.s_next).dot(feat);
        ll += std::log(std::max(0.0, p) + kMleLikelihoodFloor);
      }
      if (ll > best.log_likelihood) {
        best.log_likelihood = ll;
        best.phi_index = static_cast<int>(i);
        best.psi_index = static_cast<int>(j);
      }
    }
  }

  if (!std::isfinite(best.log_likelihood)) {
    throw NumericalError(
        "mle_fit: every candidate pair has -inf likelihood; data and class "
        "are incompatible");
  }

  best.phi = cls.phis()[static_cast<std::size_t>(best.phi_index)];
  best.psi = cls.psis()[static_cast<std::size_t>(best.psi_index)];

  // Argmax sanity: the winner's likelihood can never be below the true
  // pair's when the truth is in the class.
  const int true_i = cls.true_phi_index(data.step());
  const int true_j = cls.true_psi_index(data.step());
  {
    const PhiMap& phi = *cls.phis()[static_cast<std::size_t>(true_i)];
    const Mat& psi = cls.psis()[static_cast<std::size_t>(true_j)];
    Vec f(phi.dim());
    double ll_true = 0.0;
    for (const TransitionSample& sample : data.samples()) {
      phi.eval(sample.s, sample.a, f);
      double p = psi.row(sample.s_next).dot(f);
      ll_true += std::log(std::max(0.0, p) + kMleLikelihoodFloor);
    }
    if (best.log_likelihood < ll_true - 1e-9) {
      throw InvariantViolation(
          "mle_fit: argmax likelihood below the true pair's likelihood");
    }
  }

  return best;
}

int samp(const PhiMap& phi, const Mat& psi, int s,
         const Eigen::Ref<const Action>& a, Rng& rng) {
  require(s >= 0 && s < phi.n_states(), "samp: state out of range");
  require(in_unit_cube(a), "samp: action outside [0,1]^m");
  Vec feat(phi.dim());
  phi.eval(s, a, feat);
  Vec density = psi * feat;
  double sum = 0.0;
  for (int i = 0; i < density.size(); ++i) {
    if (density[i] < -1e-12) {
      throw InvariantViolation("samp: candidate model yields negative density");
    }
    density[i] = std::max(0.0, density[i]);
    sum += density[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvariantViolation("samp: candidate density does not normalize");
  }
  return rng.categorical(density);
}

}  // namespace flambe
