#include "flambe/distance.hpp"

#include <cmath>

namespace flambe {

namespace {

void check_pair(const Eigen::Ref<const Vec>& p, const Eigen::Ref<const Vec>& q,
                const char* who) {
  if (p.size() != q.size()) {
    throw DomainError(std::string(who) + ": length mismatch");
  }
  for (const auto* v : {&p, &q}) {
    double sum = v->sum();
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DomainError(std::string(who) + ": input does not sum to 1");
    }
    for (int i = 0; i < v->size(); ++i) {
      if ((*v)[i] < -1e-12) {
        throw DomainError(std::string(who) + ": negative probability entry");
      }
    }
  }
}

}  // namespace

double tv_distance(const Eigen::Ref<const Vec>& p,
                   const Eigen::Ref<const Vec>& q) {
  check_pair(p, q, "tv_distance");
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double hellinger_distance(const Eigen::Ref<const Vec>& p,
                          const Eigen::Ref<const Vec>& q) {
  check_pair(p, q, "hellinger_distance");
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    double d = std::sqrt(std::max(0.0, p[i])) - std::sqrt(std::max(0.0, q[i]));
    s += d * d;
  }
  return std::sqrt(0.5 * s);
}

}  // namespace flambe
