#include "flambe/embedding.hpp"

#include <cmath>

namespace flambe {

namespace {
// Overflow-safe softplus; strictly positive everywhere.
double softplus(double x) {
  if (x > 30.0) return x;
  return std::log1p(std::exp(x));
}
constexpr double kPi = 3.14159265358979323846;
}  // namespace

CosinePhi::CosinePhi(int d, int m, std::vector<Mat> weights)
    : d_(d), m_(m), weights_(std::move(weights)) {
  require(d >= 1 && m >= 1, "CosinePhi: d and m must be >= 1");
  require(!weights_.empty(), "CosinePhi: empty weight table");
  for (const Mat& w : weights_) {
    require(w.rows() == d && w.cols() == m + 1,
            "CosinePhi: weight block must be d x (m+1)");
  }
}

void CosinePhi::eval(int s, const Eigen::Ref<const Action>& a,
                     Eigen::Ref<Vec> out) const {
  const Mat& w = weights_[static_cast<std::size_t>(s)];
  double total = 0.0;
  for (int i = 0; i < d_; ++i) {
    double r = w(i, 0);
    for (int k = 0; k < m_; ++k) r += w(i, 1 + k) * std::cos(kPi * a[k]);
    double v = softplus(r);
    out[i] = v;
    total += v;
  }
  out /= total;
}

std::shared_ptr<CosinePhi> CosinePhi::with_frequency_scale(double c) const {
  std::vector<Mat> scaled = weights_;
  for (Mat& w : scaled) w.rightCols(m_) *= c;
  return std::make_shared<CosinePhi>(d_, m_, std::move(scaled));
}

AffinePhi::AffinePhi(int d, int m, std::vector<Vec> bias,
                     std::vector<Mat> slope)
    : d_(d), m_(m), bias_(std::move(bias)), slope_(std::move(slope)) {
  require(d >= 1 && m >= 1, "AffinePhi: d and m must be >= 1");
  require(bias_.size() == slope_.size() && !bias_.empty(),
          "AffinePhi: bias/slope tables must have equal state count");
  for (std::size_t s = 0; s < bias_.size(); ++s) {
    require(bias_[s].size() == d, "AffinePhi: bias block must have length d");
    require(slope_[s].rows() == d && slope_[s].cols() == m,
            "AffinePhi: slope block must be d x m");
  }
}

std::shared_ptr<AffinePhi> AffinePhi::constant(int m,
                                               std::vector<Vec> values) {
  require(!values.empty(), "AffinePhi::constant: empty value table");
  int d = static_cast<int>(values[0].size());
  std::vector<Mat> slope(values.size(), Mat::Zero(d, m));
  return std::make_shared<AffinePhi>(d, m, std::move(values),
                                     std::move(slope));
}

void AffinePhi::eval(int s, const Eigen::Ref<const Action>& a,
                     Eigen::Ref<Vec> out) const {
  const auto idx = static_cast<std::size_t>(s);
  out = bias_[idx] + slope_[idx] * a;
}

}  // namespace flambe
