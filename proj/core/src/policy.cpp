#include "flambe/policy.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace flambe {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Length of Box(t, w/2) intersected with [0,1] along one dimension.
double clipped_len(double t, double w) {
  return std::min(t + w / 2.0, 1.0) - std::max(t - w / 2.0, 0.0);
}

// integral of dt / clipped_len(t, w) over [lo, hi] in [0,1], split at the
// breakpoints w/2 and 1 - w/2 where the length changes branch.
double inv_len_integral(double lo, double hi, double w) {
  if (hi <= lo) return 0.0;
  double total = 0.0;
  // piece 1: t < w/2, len = t + w/2
  {
    double a = lo, b = std::min(hi, w / 2.0);
    if (b > a) total += std::log(b + w / 2.0) - std::log(a + w / 2.0);
  }
  // piece 2: w/2 <= t <= 1 - w/2, len = w
  {
    double a = std::max(lo, w / 2.0), b = std::min(hi, 1.0 - w / 2.0);
    if (b > a) total += (b - a) / w;
  }
  // piece 3: t > 1 - w/2, len = 1 - t + w/2
  {
    double a = std::max(lo, 1.0 - w / 2.0), b = hi;
    if (b > a) total += std::log(1.0 - a + w / 2.0) - std::log(1.0 - b + w / 2.0);
  }
  return total;
}

// Minimum of clipped_len over t in [lo, hi]: the length is piecewise
// linear with its minima at the interval endpoints.
double min_clipped_len(double lo, double hi, double w) {
  return std::min(clipped_len(lo, w), clipped_len(hi, w));
}

}  // namespace

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::GridMixture: return "grid_mixture";
    case PolicyKind::Deterministic: return "deterministic";
    case PolicyKind::Smoothed: return "smoothed";
    case PolicyKind::UniformRandom: return "uniform_random";
    case PolicyKind::FiniteMixture: return "finite_mixture";
    case PolicyKind::UniformTail: return "uniform_tail";
  }
  return "unknown";
}

void Policy::check_step(int h, int s) const {
  require(h >= 0, "policy: negative step");
  require(s >= 0, "policy: negative state");
  int hz = horizon();
  if (hz != kAnyHorizon && h >= hz) {
    throw DomainError("policy: step beyond policy horizon");
  }
}

// ---------------------------------------------------------------------------
// GridMixturePolicy

GridMixturePolicy::GridMixturePolicy(int horizon, int n_states, int m, int g,
                                     std::vector<std::vector<Vec>> table)
    : horizon_(horizon), n_states_(n_states), grid_(m, g),
      table_(std::move(table)) {
  require(horizon >= 1 && n_states >= 1, "GridMixturePolicy: bad shape");
  require(table_.size() == static_cast<std::size_t>(horizon),
          "GridMixturePolicy: need one row per step");
  for (const auto& row : table_) {
    require(row.size() == static_cast<std::size_t>(n_states),
            "GridMixturePolicy: need one cell vector per state");
    for (const Vec& p : row) {
      require(p.size() == grid_.n_cells(),
              "GridMixturePolicy: cell vector length must be g^m");
      double sum = 0.0;
      for (int c = 0; c < p.size(); ++c) {
        require(p[c] >= 0.0, "GridMixturePolicy: negative cell probability");
        sum += p[c];
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw DomainError(
            "GridMixturePolicy: cell probabilities must sum to 1 within 1e-12");
      }
    }
  }
}

std::shared_ptr<const GridMixturePolicy> GridMixturePolicy::uniform(
    int horizon, int n_states, int m, int g) {
  QuadratureGrid cells(m, g);
  Vec p = Vec::Constant(cells.n_cells(), 1.0 / static_cast<double>(cells.n_cells()));
  std::vector<std::vector<Vec>> table(
      static_cast<std::size_t>(horizon),
      std::vector<Vec>(static_cast<std::size_t>(n_states), p));
  return std::make_shared<GridMixturePolicy>(horizon, n_states, m, g,
                                             std::move(table));
}

const Vec& GridMixturePolicy::cell_probabilities(int h, int s) const {
  check_step(h, s);
  require(s < n_states_, "GridMixturePolicy: state out of range");
  return table_[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)];
}

Action GridMixturePolicy::sample(int h, int s, Rng& rng) const {
  const Vec& p = cell_probabilities(h, s);
  long cell = rng.categorical(p);
  Action lo(grid_.m()), hi(grid_.m());
  grid_.cell_bounds(cell, lo, hi);
  Action a(grid_.m());
  for (int k = 0; k < grid_.m(); ++k) a[k] = rng.uniform(lo[k], hi[k]);
  return a;
}

double GridMixturePolicy::density(int h, int s,
                                  const Eigen::Ref<const Action>& a) const {
  require(in_unit_cube(a), "policy density: action outside [0,1]^m");
  const Vec& p = cell_probabilities(h, s);
  return p[grid_.cell_of(a)] * static_cast<double>(grid_.n_cells());
}

double GridMixturePolicy::max_density() const {
  double best = 0.0;
  for (const auto& row : table_) {
    for (const Vec& p : row) best = std::max(best, p.maxCoeff());
  }
  return best * static_cast<double>(grid_.n_cells());
}

void GridMixturePolicy::visit(
    int h, int s, const QuadratureGrid& grid,
    const std::function<void(const Action&, double)>& fn) const {
  const Vec& p = cell_probabilities(h, s);
  require(grid.m() == grid_.m(), "visit: action dimension mismatch");
  if (grid.g() % grid_.g() != 0) {
    throw ConfigError(
        "quadrature grid does not refine the grid-mixture policy cells");
  }
  long sub = 1;
  int ratio = grid.g() / grid_.g();
  for (int k = 0; k < grid.m(); ++k) sub *= ratio;
  const double inv_sub = 1.0 / static_cast<double>(sub);
  for (long qc = 0; qc < grid.n_cells(); ++qc) {
    Action a = grid.midpoint(qc);
    double w = p[grid_.cell_of(a)] * inv_sub;
    if (w > 0.0) fn(a, w);
  }
}

// ---------------------------------------------------------------------------
// DeterministicPolicy

DeterministicPolicy::DeterministicPolicy(
    int m, std::vector<std::vector<Action>> actions)
    : m_(m), actions_(std::move(actions)) {
  require(!actions_.empty(), "DeterministicPolicy: empty action table");
  for (const auto& row : actions_) {
    require(!row.empty(), "DeterministicPolicy: empty state row");
    for (const Action& a : row) {
      require(a.size() == m, "DeterministicPolicy: wrong action dimension");
      require(in_unit_cube(a), "DeterministicPolicy: action outside cube");
    }
  }
}

const Action& DeterministicPolicy::action(int h, int s) const {
  check_step(h, s);
  require(s < n_states(), "DeterministicPolicy: state out of range");
  return actions_[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)];
}

Action DeterministicPolicy::sample(int h, int s, Rng&) const {
  return action(h, s);
}

double DeterministicPolicy::density(int h, int s,
                                    const Eigen::Ref<const Action>&) const {
  check_step(h, s);
  return kInf;
}

double DeterministicPolicy::max_density() const { return kInf; }

void DeterministicPolicy::visit(
    int h, int s, const QuadratureGrid&,
    const std::function<void(const Action&, double)>& fn) const {
  fn(action(h, s), 1.0);
}

// ---------------------------------------------------------------------------
// UniformRandomPolicy

Action UniformRandomPolicy::sample(int, int, Rng& rng) const {
  return rng.uniform_action(m_);
}

double UniformRandomPolicy::density(int, int,
                                    const Eigen::Ref<const Action>& a) const {
  require(in_unit_cube(a), "policy density: action outside [0,1]^m");
  return 1.0;
}

void UniformRandomPolicy::visit(
    int, int, const QuadratureGrid& grid,
    const std::function<void(const Action&, double)>& fn) const {
  require(grid.m() == m_, "visit: action dimension mismatch");
  const double w = grid.cell_volume();
  for (long c = 0; c < grid.n_cells(); ++c) fn(grid.midpoint(c), w);
}

// ---------------------------------------------------------------------------
// SmoothedPolicy

SmoothedPolicy::SmoothedPolicy(PolicyPtr base, double k)
    : base_(std::move(base)), k_(k) {
  require(static_cast<bool>(base_), "SmoothedPolicy: null base");
  if (!(k >= 1.0)) throw DomainError("SmoothedPolicy: K must be >= 1");
  require(base_->kind() != PolicyKind::FiniteMixture,
          "SmoothedPolicy: mixture bases must be smoothed component-wise");
  width_ = std::pow(k_, -1.0 / base_->action_dim());
}

void SmoothedPolicy::box_bounds(const Eigen::Ref<const Action>& center,
                                Eigen::Ref<Action> lo,
                                Eigen::Ref<Action> hi) const {
  for (int k = 0; k < center.size(); ++k) {
    lo[k] = std::max(0.0, center[k] - width_ / 2.0);
    hi[k] = std::min(1.0, center[k] + width_ / 2.0);
  }
}

Action SmoothedPolicy::sample(int h, int s, Rng& rng) const {
  Action center = base_->sample(h, s, rng);
  const int m = action_dim();
  Action lo(m), hi(m), a(m);
  box_bounds(center, lo, hi);
  for (int k = 0; k < m; ++k) a[k] = rng.uniform(lo[k], hi[k]);
  return a;
}

double SmoothedPolicy::density(int h, int s,
                               const Eigen::Ref<const Action>& a) const {
  require(in_unit_cube(a), "policy density: action outside [0,1]^m");
  check_step(h, s);
  const int m = action_dim();
  switch (base_->kind()) {
    case PolicyKind::Deterministic: {
      const auto& det = static_cast<const DeterministicPolicy&>(*base_);
      const Action& center = det.action(h, s);
      double dens = 1.0;
      for (int k = 0; k < m; ++k) {
        if (std::abs(a[k] - center[k]) > width_ / 2.0 + 1e-15) return 0.0;
        dens /= clipped_len(center[k], width_);
      }
      return dens;
    }
    case PolicyKind::UniformRandom: {
      double dens = 1.0;
      for (int k = 0; k < m; ++k) {
        dens *= inv_len_integral(std::max(0.0, a[k] - width_ / 2.0),
                                 std::min(1.0, a[k] + width_ / 2.0), width_);
      }
      return dens;
    }
    case PolicyKind::GridMixture: {
      const auto& gm = static_cast<const GridMixturePolicy&>(*base_);
      const Vec& p = gm.cell_probabilities(h, s);
      const QuadratureGrid& cells = gm.cells();
      Action lo(m), hi(m);
      double dens = 0.0;
      const double cell_density =
          static_cast<double>(cells.n_cells());  // 1 / cell volume
      for (long c = 0; c < cells.n_cells(); ++c) {
        if (p[c] <= 0.0) continue;
        cells.cell_bounds(c, lo, hi);
        double factor = p[c] * cell_density;
        for (int k = 0; k < m && factor > 0.0; ++k) {
          factor *= inv_len_integral(std::max(lo[k], a[k] - width_ / 2.0),
                                     std::min(hi[k], a[k] + width_ / 2.0),
                                     width_);
        }
        dens += factor;
      }
      return dens;
    }
    default:
      throw DomainError(
          "SmoothedPolicy: density has closed form only for deterministic, "
          "grid-mixture, and uniform bases");
  }
}

double SmoothedPolicy::max_density() const {
  // K_eff: per-base upper bound on the smoothed density, accounting for
  // the boundary renormalization. Always <= 2^m K.
  const int m = action_dim();
  switch (base_->kind()) {
    case PolicyKind::Deterministic: {
      const auto& det = static_cast<const DeterministicPolicy&>(*base_);
      double best = 0.0;
      for (int h = 0; h < det.horizon(); ++h) {
        for (int s = 0; s < det.n_states(); ++s) {
          const Action& a = det.action(h, s);
          double dens = 1.0;
          for (int k = 0; k < m; ++k) dens /= clipped_len(a[k], width_);
          best = std::max(best, dens);
        }
      }
      return best;
    }
    case PolicyKind::GridMixture: {
      const auto& gm = static_cast<const GridMixturePolicy&>(*base_);
      const QuadratureGrid& cells = gm.cells();
      Action lo(m), hi(m);
      double best = 0.0;
      for (int h = 0; h < gm.horizon(); ++h) {
        for (int s = 0; s < gm.n_states(); ++s) {
          const Vec& p = gm.cell_probabilities(h, s);
          for (long c = 0; c < cells.n_cells(); ++c) {
            if (p[c] <= 0.0) continue;
            cells.cell_bounds(c, lo, hi);
            double bound = 1.0;
            for (int k = 0; k < m; ++k) {
              bound /= min_clipped_len(lo[k], hi[k], width_);
            }
            best = std::max(best, bound);
          }
        }
      }
      return best;
    }
    case PolicyKind::UniformRandom: {
      double bound = 1.0;
      for (int k = 0; k < m; ++k) bound /= width_ / 2.0;
      return std::min(bound, std::pow(2.0, m) * k_);
    }
    default:
      return std::pow(2.0, m) * k_;
  }
}

void SmoothedPolicy::visit(
    int h, int s, const QuadratureGrid& grid,
    const std::function<void(const Action&, double)>& fn) const {
  const int m = action_dim();
  const int inner_g = grid.g();
  long inner_cells = 1;
  for (int k = 0; k < m; ++k) inner_cells *= inner_g;
  const double inner_w = 1.0 / static_cast<double>(inner_cells);
  Action lo(m), hi(m), a(m);
  base_->visit(h, s, grid, [&](const Action& center, double w_outer) {
    box_bounds(center, lo, hi);
    for (long c = 0; c < inner_cells; ++c) {
      long rest = c;
      for (int k = m - 1; k >= 0; --k) {
        long digit = rest % inner_g;
        rest /= inner_g;
        a[k] = lo[k] + (hi[k] - lo[k]) * (static_cast<double>(digit) + 0.5) /
                           inner_g;
      }
      fn(a, w_outer * inner_w);
    }
  });
}

// ---------------------------------------------------------------------------
// UniformTailPolicy

UniformTailPolicy::UniformTailPolicy(PolicyPtr base, int uniform_from)
    : base_(std::move(base)), uniform_from_(uniform_from) {
  require(static_cast<bool>(base_), "UniformTailPolicy: null base");
  require(uniform_from >= 0, "UniformTailPolicy: negative switch step");
  require(base_->kind() != PolicyKind::FiniteMixture,
          "UniformTailPolicy: decompose mixtures before wrapping");
  int hz = base_->horizon();
  require(hz == kAnyHorizon || hz >= uniform_from,
          "UniformTailPolicy: base does not cover the prefix");
}

Action UniformTailPolicy::sample(int h, int s, Rng& rng) const {
  if (h < uniform_from_) return base_->sample(h, s, rng);
  return rng.uniform_action(action_dim());
}

double UniformTailPolicy::density(int h, int s,
                                  const Eigen::Ref<const Action>& a) const {
  if (h < uniform_from_) return base_->density(h, s, a);
  require(in_unit_cube(a), "policy density: action outside [0,1]^m");
  return 1.0;
}

double UniformTailPolicy::max_density() const {
  return std::max(1.0, base_->max_density());
}

void UniformTailPolicy::visit(
    int h, int s, const QuadratureGrid& grid,
    const std::function<void(const Action&, double)>& fn) const {
  if (h < uniform_from_) {
    base_->visit(h, s, grid, fn);
    return;
  }
  const double w = grid.cell_volume();
  for (long c = 0; c < grid.n_cells(); ++c) fn(grid.midpoint(c), w);
}

// ---------------------------------------------------------------------------
// FiniteMixturePolicy

FiniteMixturePolicy::FiniteMixturePolicy(std::vector<PolicyPtr> components,
                                         std::vector<double> weights) {
  require(!components.empty(), "FiniteMixturePolicy: no components");
  require(components.size() == weights.size(),
          "FiniteMixturePolicy: weight count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    require(static_cast<bool>(components[i]),
            "FiniteMixturePolicy: null component");
    require(weights[i] >= 0.0, "FiniteMixturePolicy: negative weight");
    sum += weights[i];
    if (const auto* nested =
            dynamic_cast<const FiniteMixturePolicy*>(components[i].get())) {
      for (std::size_t j = 0; j < nested->n_components(); ++j) {
        components_.push_back(nested->component(j));
        weights_.push_back(weights[i] * nested->weight(j));
      }
    } else {
      components_.push_back(components[i]);
      weights_.push_back(weights[i]);
    }
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw DomainError("FiniteMixturePolicy: weights must sum to 1");
  }
  int m = components_[0]->action_dim();
  for (const auto& c : components_) {
    require(c->action_dim() == m,
            "FiniteMixturePolicy: inconsistent action dimensions");
  }
}

std::shared_ptr<const FiniteMixturePolicy> FiniteMixturePolicy::uniform_over(
    std::vector<PolicyPtr> components) {
  std::vector<double> w(components.size(),
                        1.0 / static_cast<double>(components.size()));
  return std::make_shared<FiniteMixturePolicy>(std::move(components),
                                               std::move(w));
}

int FiniteMixturePolicy::horizon() const {
  int hz = kAnyHorizon;
  for (const auto& c : components_) {
    int c_hz = c->horizon();
    if (c_hz == kAnyHorizon) continue;
    hz = hz == kAnyHorizon ? c_hz : std::min(hz, c_hz);
  }
  return hz;
}

Action FiniteMixturePolicy::sample(int, int, Rng&) const {
  throw DomainError(
      "FiniteMixturePolicy: trajectory-level mixture has no per-step sampler; "
      "draw a component first");
}

double FiniteMixturePolicy::density(int, int,
                                    const Eigen::Ref<const Action>&) const {
  throw DomainError(
      "FiniteMixturePolicy: per-step density of a trajectory-level mixture "
      "is undefined");
}

double FiniteMixturePolicy::max_density() const {
  double best = 0.0;
  for (const auto& c : components_) best = std::max(best, c->max_density());
  return best;
}

void FiniteMixturePolicy::visit(
    int, int, const QuadratureGrid&,
    const std::function<void(const Action&, double)>&) const {
  throw DomainError(
      "FiniteMixturePolicy: visit is undefined; decompose by component");
}

int FiniteMixturePolicy::sample_component(Rng& rng) const {
  Vec w(static_cast<int>(weights_.size()));
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    w[static_cast<int>(i)] = weights_[i];
  }
  return rng.categorical(w);
}

// ---------------------------------------------------------------------------

void for_each_component(
    const Policy& policy,
    const std::function<void(double, const Policy&)>& fn) {
  if (const auto* mix = dynamic_cast<const FiniteMixturePolicy*>(&policy)) {
    for (std::size_t i = 0; i < mix->n_components(); ++i) {
      fn(mix->weight(i), *mix->component(i));
    }
  } else {
    fn(1.0, policy);
  }
}

PolicyPtr smooth_policy(PolicyPtr base, double k) {
  require(static_cast<bool>(base), "smooth_policy: null base");
  if (const auto* mix = dynamic_cast<const FiniteMixturePolicy*>(base.get())) {
    std::vector<PolicyPtr> comps;
    std::vector<double> weights;
    for (std::size_t i = 0; i < mix->n_components(); ++i) {
      comps.push_back(std::make_shared<SmoothedPolicy>(mix->component(i), k));
      weights.push_back(mix->weight(i));
    }
    return std::make_shared<FiniteMixturePolicy>(std::move(comps),
                                                 std::move(weights));
  }
  return std::make_shared<SmoothedPolicy>(std::move(base), k);
}

PolicyPtr make_uniform_tail(PolicyPtr base, int uniform_from) {
  require(static_cast<bool>(base), "make_uniform_tail: null base");
  if (const auto* mix = dynamic_cast<const FiniteMixturePolicy*>(base.get())) {
    std::vector<PolicyPtr> comps;
    std::vector<double> weights;
    for (std::size_t i = 0; i < mix->n_components(); ++i) {
      comps.push_back(
          std::make_shared<UniformTailPolicy>(mix->component(i), uniform_from));
      weights.push_back(mix->weight(i));
    }
    return std::make_shared<FiniteMixturePolicy>(std::move(comps),
                                                 std::move(weights));
  }
  return std::make_shared<UniformTailPolicy>(std::move(base), uniform_from);
}

}  // namespace flambe
