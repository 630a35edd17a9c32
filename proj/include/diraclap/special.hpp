#pragma once

#include "diraclap/types.hpp"

namespace diraclap {

/// Series/asymptotic switch for the Hankel evaluators, on |z|.
inline constexpr double kHankelSwitch = 12.0;

/// Hankel functions of the first kind, orders 0 and 1, for z with Im z >= 0
/// and z != 0 (principal branch). Relative error <= 1e-10 on the real axis.
cplx hankel1_0(cplx z);
cplx hankel1_1(cplx z);

}  // namespace diraclap
