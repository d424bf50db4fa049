#include "flambe/hyper.hpp"

#include <cmath>
#include <sstream>

namespace flambe {

namespace {

struct LogFactors {
  // When set, these replace log(1 + 8/beta'), the J_max log factor, and
  // the MLE class-size log factor respectively.
  std::optional<double> l_beta;
  std::optional<double> l_jmax;
  std::optional<double> l_mle;
};

HyperParams compute(const HyperInputs& inputs, const LogFactors& frozen) {
  const SmoothnessProfile& profile = inputs.profile;
  profile.validate();
  require(inputs.eps > 0.0 && inputs.eps < 1.0,
          "hyperparams: eps must be in (0,1)");
  require(inputs.delta > 0.0 && inputs.delta < 1.0,
          "hyperparams: delta must be in (0,1)");
  require(inputs.d >= 1 && inputs.horizon >= 1, "hyperparams: bad d or H");
  require(inputs.n_phi >= 1 && inputs.n_psi >= 1,
          "hyperparams: class sizes must be >= 1");

  HyperParams out;
  out.provenance = HyperProvenance::Theoretical;
  out.tau = profile.tau();
  out.kappa = profile.kappa();
  out.sigma = profile.sigma();

  const double m = profile.m;
  const double h = inputs.horizon;
  const double d = inputs.d;

  double eps = inputs.eps;
  if (inputs.scope == PolicyScope::UnrestrictedPolicy) {
    const double l = profile.l_combined();
    require(l > 0.0,
            "hyperparams: unrestricted scope needs a positive combined L");
    out.k = std::pow(8.0 * std::sqrt(m) * h * l / eps, out.sigma);
    eps = eps / 2.0;
  } else {
    require(inputs.k >= 1.0, "hyperparams: density cap K must be >= 1");
    out.k = inputs.k;
  }

  out.u = inputs.c_theorem1 * std::pow(profile.l_e, out.kappa);
  require(out.u > 0.0, "hyperparams: U = c L_E^kappa must be positive");

  // beta' = 8 / (2^16 d^4 H^4 U^2 eps^-4 - 1)
  const double denom = std::pow(2.0, 16) * std::pow(d, 4) * std::pow(h, 4) *
                           out.u * out.u * std::pow(eps, -4.0) -
                       1.0;
  if (denom <= 0.0) {
    std::ostringstream os;
    os << "hyperparams: 2^16 d^4 H^4 U^2 eps^-4 = " << denom + 1.0
       << " <= 1, so beta' has no positive assignment (eps too large "
          "relative to d, H, U)";
    throw DomainError(os.str());
  }
  out.beta = 8.0 / denom;

  const double tau = out.tau;
  const double log_beta =
      frozen.l_beta.value_or(std::log(1.0 + 8.0 / out.beta));

  // eps_tv = 8^{-4-4tau} H^{-8-8tau} U^{-4-4tau} K^{-2-2tau} d^{-2-2tau}
  //          eps^{4+4tau} / log(1+8/beta')^{2+2tau}
  out.eps_tv = std::pow(8.0, -4.0 - 4.0 * tau) *
               std::pow(h, -8.0 - 8.0 * tau) *
               std::pow(out.u, -4.0 - 4.0 * tau) *
               std::pow(out.k, -2.0 - 2.0 * tau) *
               std::pow(d, -2.0 - 2.0 * tau) * std::pow(eps, 4.0 + 4.0 * tau) /
               std::pow(log_beta, 2.0 + 2.0 * tau);

  // lambda: same expression with d^{-3-2tau} and a leading 1/2.
  out.lambda = 0.5 * std::pow(8.0, -4.0 - 4.0 * tau) *
               std::pow(h, -8.0 - 8.0 * tau) *
               std::pow(out.u, -4.0 - 4.0 * tau) *
               std::pow(out.k, -2.0 - 2.0 * tau) *
               std::pow(d, -3.0 - 2.0 * tau) * std::pow(eps, 4.0 + 4.0 * tau) /
               std::pow(log_beta, 2.0 + 2.0 * tau);

  // J_max = (4Hd / (lambda U eps_tv^{1/(2(1+tau))}))
  //         * log(1 + 4H / (lambda U eps_tv^{1/(2(1+tau))}))
  const double tv_pow = std::pow(out.eps_tv, 1.0 / (2.0 * (1.0 + tau)));
  const double denom_j = out.lambda * out.u * tv_pow;
  const double log_jmax =
      frozen.l_jmax.value_or(std::log(1.0 + 4.0 * h / denom_j));
  out.j_max = (4.0 * h * d / denom_j) * log_jmax;

  // n = 8^{4+4tau} H^{8+8tau} U^{4+4tau} K^{2+2tau} d^{2+2tau}
  //     log(1+8/beta')^{2+2tau} / eps^{4+4tau} * log(J_max H |Phi||Psi| / delta)
  const double log_mle = frozen.l_mle.value_or(std::log(
      out.j_max * h * inputs.n_phi * inputs.n_psi / inputs.delta));
  out.n = std::pow(8.0, 4.0 + 4.0 * tau) * std::pow(h, 8.0 + 8.0 * tau) *
          std::pow(out.u, 4.0 + 4.0 * tau) * std::pow(out.k, 2.0 + 2.0 * tau) *
          std::pow(d, 2.0 + 2.0 * tau) * std::pow(log_beta, 2.0 + 2.0 * tau) /
          std::pow(eps, 4.0 + 4.0 * tau) * log_mle;

  out.trajectory_count = out.n * out.j_max * h;
  return out;
}

}  // namespace

HyperParams HyperParams::practical(double n, double j_max, double beta,
                                   double k) {
  HyperParams out;
  out.provenance = HyperProvenance::Practical;
  out.n = n;
  out.j_max = j_max;
  out.beta = beta;
  out.k = k;
  return out;
}

HyperParams theoretical_hyperparams(const HyperInputs& inputs) {
  return compute(inputs, LogFactors{});
}

HyperParams theoretical_hyperparams_frozen(const HyperInputs& inputs,
                                           const HyperInputs& reference) {
  HyperParams ref = compute(reference, LogFactors{});
  LogFactors frozen;
  frozen.l_beta = std::log(1.0 + 8.0 / ref.beta);
  const double tv_pow =
      std::pow(ref.eps_tv, 1.0 / (2.0 * (1.0 + ref.tau)));
  frozen.l_jmax =
      std::log(1.0 + 4.0 * reference.horizon / (ref.lambda * ref.u * tv_pow));
  frozen.l_mle = std::log(ref.j_max * reference.horizon * reference.n_phi *
                          reference.n_psi / reference.delta);
  return compute(inputs, frozen);
}

}  // namespace flambe
