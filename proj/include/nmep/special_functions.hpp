#pragma once

#include "nmep/error.hpp"

namespace nmep {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kE = 2.718281828459045235360287471352662498;
inline constexpr double kInvE = 0.367879441171442321595523770161460867;

// Branch `branch` of the Lambert W function, the solutions of W e^W = z.
//
// Branch cuts follow the usual convention: W_0 is cut along (-inf, -1/e],
// every other branch along (-inf, 0], and values on a cut are continuous
// with the upper half plane (counter-clockwise continuity). W_0 and W_-1
// meet at the branch point z = -1/e where both equal -1.
//
// Throws Error(domain) for z = 0 on a nonzero branch and ConvergenceError
// if Halley iteration does not settle within the iteration cap.
cplx lambert_w(int branch, cplx z);

namespace detail {

// Index of the branch whose range contains w (ties on the boundary curves
// resolved as for z approached from above the cut).
int lambert_branch_of(cplx w);

}  // namespace detail

}  // namespace nmep
