#pragma once

#include "flambe/common.hpp"

#include <memory>

namespace flambe {

// State-action embedding phi : S x [0,1]^m -> R^d. Concrete families are
// parametric so models round-trip through the JSON schema.
class PhiMap {
 public:
  virtual ~PhiMap() = default;

  virtual int dim() const = 0;         // d
  virtual int action_dim() const = 0;  // m
  virtual int n_states() const = 0;

  virtual void eval(int s, const Eigen::Ref<const Action>& a,
                    Eigen::Ref<Vec> out) const = 0;

  // True when every component is concave in the action; enables the
  // concave inner optimizer in the planner.
  virtual bool concave_in_action() const { return false; }

  Vec operator()(int s, const Eigen::Ref<const Action>& a) const {
    Vec out(dim());
    eval(s, a, out);
    return out;
  }
};

using PhiPtr = std::shared_ptr<const PhiMap>;

// Simplex-valued embedding built from bandwidth-1 cosine features:
//   r_i(s, a) = W(s, i, 0) + sum_k W(s, i, k) * cos(pi * a_k)
//   phi_i(s, a) = softplus(r_i) / sum_j softplus(r_j)
// Entries are positive and sum to 1, so ||phi||_2 <= 1 holds for free and
// pairing with column-stochastic psi matrices always yields densities.
class CosinePhi final : public PhiMap {
 public:
  // weights[s] is a d x (m+1) matrix: column 0 bias, column 1+k the
  // coefficient of cos(pi * a_k).
  CosinePhi(int d, int m, std::vector<Mat> weights);

  int dim() const override { return d_; }
  int action_dim() const override { return m_; }
  int n_states() const override { return static_cast<int>(weights_.size()); }

  void eval(int s, const Eigen::Ref<const Action>& a,
            Eigen::Ref<Vec> out) const override;

  const std::vector<Mat>& weights() const { return weights_; }

  // Same embedding with all action-frequency columns multiplied by c;
  // c = 0 gives an action-independent embedding.
  std::shared_ptr<CosinePhi> with_frequency_scale(double c) const;

 private:
  int d_;
  int m_;
  std::vector<Mat> weights_;
};

// Affine embedding phi_i(s, a) = bias(s, i) + sum_k slope(s, i, k) a_k.
// Used for hand-built instances in tests and for concave-optimizer paths;
// validity of the induced densities is checked by the model constructor,
// not here.
class AffinePhi final : public PhiMap {
 public:
  // bias[s] is a length-d vector, slope[s] a d x m matrix.
  AffinePhi(int d, int m, std::vector<Vec> bias, std::vector<Mat> slope);

  // Convenience: action-independent embedding, one vector per state.
  static std::shared_ptr<AffinePhi> constant(int m, std::vector<Vec> values);

  int dim() const override { return d_; }
  int action_dim() const override { return m_; }
  int n_states() const override { return static_cast<int>(bias_.size()); }

  void eval(int s, const Eigen::Ref<const Action>& a,
            Eigen::Ref<Vec> out) const override;

  bool concave_in_action() const override { return true; }

  const std::vector<Vec>& bias() const { return bias_; }
  const std::vector<Mat>& slope() const { return slope_; }

 private:
  int d_;
  int m_;
  std::vector<Vec> bias_;
  std::vector<Mat> slope_;
};

}  // namespace flambe
