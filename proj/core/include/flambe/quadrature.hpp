#pragma once

#include "flambe/common.hpp"

#include <functional>

namespace flambe {

// Uniform midpoint grid over [0,1]^m with g cells per dimension.
// Cells are indexed lexicographically with dimension 0 most significant,
// so scanning flat indices in increasing order is the canonical tie-break
// order used throughout.
class QuadratureGrid {
 public:
  QuadratureGrid(int m, int g) : m_(m), g_(g) {
    require(m >= 1, "QuadratureGrid: m must be >= 1");
    require(g >= 1, "QuadratureGrid: g must be >= 1");
    n_cells_ = 1;
    for (int k = 0; k < m; ++k) n_cells_ *= static_cast<long>(g);
  }

  int m() const { return m_; }
  int g() const { return g_; }
  long n_cells() const { return n_cells_; }
  double cell_width() const { return 1.0 / g_; }
  double cell_volume() const { return 1.0 / static_cast<double>(n_cells_); }

  Action midpoint(long cell) const {
    Action a(m_);
    for (int k = m_ - 1; k >= 0; --k) {
      long digit = cell % g_;
      cell /= g_;
      a[k] = (static_cast<double>(digit) + 0.5) / g_;
    }
    return a;
  }

  // Cell containing a; points with a coordinate exactly 1 land in the
  // last cell of that dimension.
  long cell_of(const Eigen::Ref<const Action>& a) const {
    require(a.size() == m_, "cell_of: wrong action dimension");
    long flat = 0;
    for (int k = 0; k < m_; ++k) {
      long digit = static_cast<long>(a[k] * g_);
      if (digit >= g_) digit = g_ - 1;
      if (digit < 0) digit = 0;
      flat = flat * g_ + digit;
    }
    return flat;
  }

  // Per-dimension bounds [lo, hi) of a cell.
  void cell_bounds(long cell, Eigen::Ref<Action> lo, Eigen::Ref<Action> hi) const {
    for (int k = m_ - 1; k >= 0; --k) {
      long digit = cell % g_;
      cell /= g_;
      lo[k] = static_cast<double>(digit) / g_;
      hi[k] = static_cast<double>(digit + 1) / g_;
    }
  }

 private:
  int m_;
  int g_;
  long n_cells_;
};

// Values of a scalar function tabulated on the midpoints of a grid,
// in flat cell order.
struct GridFunction {
  QuadratureGrid grid;
  std::vector<double> values;

  static GridFunction tabulate(
      const QuadratureGrid& grid,
      const std::function<double(const Action&)>& f) {
    GridFunction out{grid, std::vector<double>(grid.n_cells())};
    for (long c = 0; c < grid.n_cells(); ++c) {
      out.values[static_cast<std::size_t>(c)] = f(grid.midpoint(c));
    }
    return out;
  }

  double max() const {
    double v = values.empty() ? 0.0 : values[0];
    for (double x : values) v = std::max(v, x);
    return v;
  }

  // Midpoint-rule average, i.e. the quadrature estimate of the mean
  // over [0,1]^m.
  double mean() const {
    double s = 0.0;
    for (double x : values) s += x;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
  }
};

}  // namespace flambe
