#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flambe {

inline constexpr const char* kVersion = "0.1.0";

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// An action is a point in the unit cube [0,1]^m.
using Action = Eigen::VectorXd;

// Invalid input on a documented operation contract.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad or inconsistent configuration (grids, file schemas, missing fields).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stated invariant failed at runtime. Always indicates a bug in the
// model construction or in this library, never a recoverable condition.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Downstream numerical failure (non-convergence, degenerate data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic stream derivation: the same (seed, stream ids) always
// yields the same generator state, independent of call order elsewhere.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> stream) {
  std::uint64_t x = seed;
  (void)detail::splitmix64(x);
  for (std::uint64_t s : stream) {
    x ^= 0x9e3779b97f4a7c15ULL + s;
    (void)detail::splitmix64(x);
  }
  return detail::splitmix64(x);
}

// Seeded RNG with hand-rolled draws. std::* distributions are
// implementation-defined, so every draw here is built directly from the
// mt19937_64 output stream to keep results bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static Rng derived(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> stream) {
    return Rng(derive_seed(seed, stream));
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (uses exactly two uniforms).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Index draw from an unnormalized nonnegative weight vector.
  int categorical(const Eigen::Ref<const Vec>& weights) {
    double total = 0.0;
    for (int i = 0; i < weights.size(); ++i) {
      if (weights[i] < 0.0) {
        throw DomainError("categorical: negative weight");
      }
      total += weights[i];
    }
    if (total <= 0.0) throw DomainError("categorical: zero total weight");
    double u = uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return static_cast<int>(weights.size()) - 1;
  }

  int uniform_int(int n) {  // uniform on {0, ..., n-1}
    if (n <= 0) throw DomainError("uniform_int: n must be positive");
    return static_cast<int>(uniform() * n) % n;
  }

  Action uniform_action(int m) {
    Action a(m);
    for (int k = 0; k < m; ++k) a[k] = uniform();
    return a;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw DomainError(msg);
}

inline bool in_unit_cube(const Eigen::Ref<const Action>& a) {
  for (int k = 0; k < a.size(); ++k) {
    if (!(a[k] >= 0.0 && a[k] <= 1.0)) return false;
  }
  return true;
}

}  // namespace flambe
