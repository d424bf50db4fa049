#include "flambe/mdp.hpp"

#include <cmath>
#include <sstream>

namespace flambe {

namespace {

// Probe actions used by construction-time checks.
std::vector<Action> probe_actions(int m) {
  int g = m == 1 ? 33 : (m == 2 ? 9 : 5);
  long n = 1;
  for (int k = 0; k < m; ++k) n *= g;
  std::vector<Action> probes;
  probes.reserve(static_cast<std::size_t>(n));
  for (long c = 0; c < n; ++c) {
    Action a(m);
    long rest = c;
    for (int k = m - 1; k >= 0; --k) {
      long digit = rest % g;
      rest /= g;
      a[k] = static_cast<double>(digit) / (g - 1);
    }
    probes.push_back(a);
  }
  return probes;
}

}  // namespace

LowRankMDP::LowRankMDP(int m, int d, int horizon, Vec rho,
                       std::vector<PhiPtr> phi, std::vector<Mat> psi)
    : n_states_(static_cast<int>(rho.size())),
      m_(m),
      d_(d),
      horizon_(horizon),
      rho_(std::move(rho)),
      phi_(std::move(phi)),
      psi_(std::move(psi)) {
  require(m_ >= 1, "LowRankMDP: action dimension must be >= 1");
  require(d_ >= 1, "LowRankMDP: rank must be >= 1");
  require(horizon_ >= 1, "LowRankMDP: horizon must be >= 1");
  require(n_states_ >= 1, "LowRankMDP: empty state space");
  require(phi_.size() == static_cast<std::size_t>(horizon_),
          "LowRankMDP: need one phi per step");
  require(psi_.size() == static_cast<std::size_t>(horizon_),
          "LowRankMDP: need one psi per step");
  for (int h = 0; h < horizon_; ++h) {
    const PhiMap& p = *phi_[static_cast<std::size_t>(h)];
    require(p.dim() == d_ && p.action_dim() == m_ &&
                p.n_states() == n_states_,
            "LowRankMDP: phi block shape mismatch");
    const Mat& q = psi_[static_cast<std::size_t>(h)];
    require(q.rows() == n_states_ && q.cols() == d_,
            "LowRankMDP: psi block must be |S| x d");
  }
  validate();
}

void LowRankMDP::validate() const {
  double rho_sum = rho_.sum();
  if (std::abs(rho_sum - 1.0) > 1e-12) {
    throw DomainError("LowRankMDP: rho must sum to 1 within 1e-12");
  }
  for (int s = 0; s < n_states_; ++s) {
    if (rho_[s] < 0.0) throw DomainError("LowRankMDP: rho entry < 0");
  }

  const auto probes = probe_actions(m_);
  Vec feat(d_);
  for (int h = 0; h < horizon_; ++h) {
    const PhiMap& p = phi(h);
    for (int s = 0; s < n_states_; ++s) {
      for (const Action& a : probes) {
        p.eval(s, a, feat);
        if (feat.norm() > 1.0 + 1e-9) {
          std::ostringstream os;
          os << "LowRankMDP: ||phi||_2 > 1 at (h=" << h << ", s=" << s << ")";
          throw InvariantViolation(os.str());
        }
        // Density validity at the probe as well.
        (void)transition_density(h, s, a);
      }
    }

    // psi normalization over indicator-style weights g in [0,1]^|S|.
    // sum_s' g(s') psi(s') is affine in g, and the squared norm is convex,
    // so the maximum over the box is attained at a vertex; vertices are
    // enumerated exactly for |S| <= 12 and sampled otherwise.
    const Mat& q = psi(h);
    const double cap = std::sqrt(static_cast<double>(d_)) + 1e-9;
    if (n_states_ <= 12) {
      const long n_vertices = 1L << n_states_;
      for (long mask = 0; mask < n_vertices; ++mask) {
        Vec acc = Vec::Zero(d_);
        for (int s = 0; s < n_states_; ++s) {
          if ((mask >> s) & 1L) acc += q.row(s).transpose();
        }
        if (acc.norm() > cap) {
          throw InvariantViolation(
              "LowRankMDP: psi normalization violated on a vertex");
        }
      }
    } else {
      Rng rng = Rng::derived(0x5eedULL, {static_cast<std::uint64_t>(h)});
      for (int trial = 0; trial < 10000; ++trial) {
        Vec acc = Vec::Zero(d_);
        for (int s = 0; s < n_states_; ++s) {
          if (rng.uniform() < 0.5) acc += q.row(s).transpose();
        }
        if (acc.norm() > cap) {
          throw InvariantViolation(
              "LowRankMDP: psi normalization violated on a sampled vertex");
        }
      }
    }
  }
}

Vec LowRankMDP::transition_density(int h, int s,
                                   const Eigen::Ref<const Action>& a) const {
  require(h >= 0 && h < horizon_, "transition_density: step out of range");
  require(s >= 0 && s < n_states_, "transition_density: state out of range");
  require(a.size() == m_, "transition_density: wrong action dimension");
  if (!in_unit_cube(a)) {
    throw DomainError("transition_density: action outside [0,1]^m");
  }

  Vec feat(d_);
  phi(h).eval(s, a, feat);
  Vec density = psi(h) * feat;

  double sum = 0.0;
  for (int i = 0; i < n_states_; ++i) {
    if (density[i] < -1e-12) {
      std::ostringstream os;
      os << "model integrity: negative density " << density[i] << " at (h="
         << h << ", s=" << s << ", a=[";
      for (int k = 0; k < m_; ++k) os << (k ? "," : "") << a[k];
      os << "])";
      throw InvariantViolation(os.str());
    }
    if (density[i] < 0.0) density[i] = 0.0;
    sum += density[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "model integrity: density sums to " << sum << " at (h=" << h
       << ", s=" << s << ")";
    throw InvariantViolation(os.str());
  }
  density /= sum;
  return density;
}

RewardFunction::RewardFunction(int horizon, Fn fn, bool sparse,
                               std::optional<HolderMeta> smoothness)
    : horizon_(horizon),
      fn_(std::move(fn)),
      sparse_(sparse),
      smoothness_(smoothness) {
  require(horizon_ >= 1, "RewardFunction: horizon must be >= 1");
  require(static_cast<bool>(fn_), "RewardFunction: empty function");
}

RewardFunction RewardFunction::single_step(int horizon, int step, StepFn fn,
                                           std::optional<HolderMeta> meta) {
  require(step >= 0 && step < horizon,
          "RewardFunction::single_step: step out of range");
  return RewardFunction(
      horizon,
      [step, fn = std::move(fn)](int h, int s, const Action& a) {
        return h == step ? fn(s, a) : 0.0;
      },
      /*sparse=*/true, meta);
}

RewardFunction RewardFunction::zero(int horizon) {
  return RewardFunction(
      horizon, [](int, int, const Action&) { return 0.0; },
      /*sparse=*/true, HolderMeta{1.0, 0.0});
}

double RewardFunction::operator()(int h, int s,
                                  const Eigen::Ref<const Action>& a) const {
  double v = fn_(h, s, a);
  if (v < -1e-12 || v > 1.0 + 1e-12) {
    throw DomainError("RewardFunction: value outside [0,1]");
  }
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace flambe
