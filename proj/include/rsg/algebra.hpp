#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsg/comparison_function.hpp"

namespace rsg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  static Interval closed(double a, double b) { return {a, b, false, false}; }
  static Interval open(double a, double b) { return {a, b, true, true}; }
  static Interval left_open(double a, double b) { return {a, b, true, false}; }
  static Interval right_open(double a, double b) { return {a, b, false, true}; }

  bool bounded() const { return hi < kInf; }
  bool contains(double s) const;
};

enum class GridKind { uniform, geometric };

// n points covering the interval; open ends are excluded by treating the n
// points as interior nodes of a finer partition.
std::vector<double> make_grid(const Interval& iv, std::size_t n, GridKind kind = GridKind::uniform);

enum class Orientation { gamma_after_delta, delta_after_gamma };
const char* to_string(Orientation o);

enum class TailComparator { affine_beats_cube_root, affine_beats_affine };
const char* to_string(TailComparator c);

// Claim: beyond `threshold`, the margin of the chosen orientation stays
// positive because delta^{-1} is eventually affine and gamma is dominated by
// the comparator family. Checked symbolically against the gain structure.
struct TailCertificate {
  double threshold = 10.0;
  TailComparator comparator = TailComparator::affine_beats_cube_root;
};

struct TailProof {
  bool holds = false;
  double from = 0.0;  // start of the proven range in the gamma argument
  std::string detail;
};

struct MarginReport {
  Interval interval;
  std::size_t grid_size = 0;
  double min_margin = 0.0;
  double argmin = 0.0;
  bool passed = false;
  std::size_t violation_count = 0;
  // Contiguous runs of grid points with non-positive margin, as [first, last].
  std::vector<std::pair<double, double>> violation_runs;
  std::optional<TailProof> tail;
};

struct SmallGainOptions {
  double s_max = 100.0;
  GridKind grid = GridKind::uniform;
  std::optional<TailCertificate> tail;
};

// s with |f(s) - y| <= 1e-10 (relative beyond |y| = 1), s in [lo, hi].
double invert(const ComparisonFunction& f, double y, double lo, double hi);

// min over the grid of min(mid - lower, upper - mid).
MarginReport sandwich_margin(const Gain& lower, const Gain& mid, const Gain& upper,
                             const Interval& iv, std::size_t grid_n);

// min over the grid of s - gamma(delta(s)) or s - delta(gamma(s)).
MarginReport small_gain_margin(const Gain& gamma, const Gain& delta, const Interval& iv,
                               Orientation o, std::size_t grid_n,
                               const SmallGainOptions& opts = {});

TailProof prove_tail(const Gain& gamma, const Gain& delta, Orientation o,
                     const TailCertificate& cert);

// Margin of a - b on a grid; building block for corridor checks.
MarginReport gap_margin(const Gain& a, const Gain& b, const Interval& iv, std::size_t grid_n,
                        GridKind kind = GridKind::uniform);

}  // namespace rsg
