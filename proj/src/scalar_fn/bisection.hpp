#pragma once

#include <span>

#include "rsg/comparison_function.hpp"

namespace rsg::detail {

inline constexpr int kMaxBisection = 200;

// Width below which a bracket counts as resolved; a few ulps of hi.
inline double bisect_width_tol(double hi) { return 1e-15 * (hi > 1.0 ? hi : 1.0); }

// Solves f(x) = y on [lo, hi] for increasing f. Throws BracketError when y is
// outside [f(lo), f(hi)] by more than a relative 1e-12.
double bisect(const ComparisonFunction& f, double y, double lo, double hi);

// Lane-wise bisect() on a batch of targets; bit-identical to the scalar loop.
void bisect_many(const ComparisonFunction& f, std::span<const double> y,
                 double lo, double hi, std::span<double> out);

}  // namespace rsg::detail
