#pragma once

#include <optional>
#include <vector>

#include "rsg/comparison_function.hpp"

namespace rsg {

struct KinfBridge {
  ComparisonFunction fn;
  double p, q, epsilon;
  double K, A, B;
};

// Unbounded bridge beta~ with alpha < beta~ everywhere and beta~ < beta^{-1}
// on [p, q]. Constants K, A, B are fixed by continuity at p, q and q + eps;
// eps defaults to 0.01 (q - p). p = 0 drops the first branch.
KinfBridge build_kinf_bridge(const ComparisonFunction& alpha, const ComparisonFunction& beta,
                             double p, double q, std::optional<double> epsilon = std::nullopt);

struct SmoothBridge {
  ComparisonFunction sigma;
  std::vector<double> knots;  // final knot set after repairs, without 0
  int repair_rounds = 0;
  double min_margin = 0.0;    // over the verification grid
};

// C^1 strictly increasing sigma with lower < sigma < upper: monotone cubic
// Hermite through geometric means at the knots, repaired by knot insertion.
SmoothBridge build_smooth_bridge(const Gain& lower, const Gain& upper,
                                 std::vector<double> knots);

std::vector<double> log_knots(double lo, double hi, std::size_t n);

// Fritsch-Butland slopes for strictly increasing data, with end slopes kept
// inside the monotone region.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rsg
