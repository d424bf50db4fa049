#pragma once

#include "flambe/common.hpp"

namespace flambe {

// Total variation distance (1/2) * sum |p_i - q_i| between two probability
// vectors of equal length. Inputs must each sum to 1 within 1e-9.
double tv_distance(const Eigen::Ref<const Vec>& p,
                   const Eigen::Ref<const Vec>& q);

// Hellinger distance sqrt((1/2) * sum (sqrt(p_i) - sqrt(q_i))^2).
double hellinger_distance(const Eigen::Ref<const Vec>& p,
                          const Eigen::Ref<const Vec>& q);

}  // namespace flambe
