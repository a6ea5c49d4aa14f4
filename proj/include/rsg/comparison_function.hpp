#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace rsg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ComparisonFunction;
using FnPtr = std::shared_ptr<const ComparisonFunction>;

namespace seg {

// v0 + slope * (s - piece_start)
struct Affine {
  double v0;
  double slope;
};

// c[0] + c[1] s + c[2] s^2 + c[3] s^3 (absolute s)
struct Cubic {
  std::array<double, 4> c;
};

// Cubic Hermite interpolant through (x[i], y[i]) with end slopes d[i]. The
// power-form coefficients are derived once at construction.
struct Hermite {
  std::vector<double> x, y, d;
  std::vector<double> h, a1, a2, a3;
};

// s -> of^{-1}(input_scale * s) restricted to the bracket [lo, hi]; hi may be
// infinite, in which case the bracket is expanded by doubling.
struct BranchInverse {
  FnPtr of;
  double lo;
  double hi;
  double input_scale;
};

struct Compose {
  FnPtr outer;
  FnPtr inner;
};

struct Sum {
  std::vector<std::pair<double, FnPtr>> terms;
};

struct Min {
  std::vector<FnPtr> of;
};

}  // namespace seg

using Segment = std::variant<seg::Affine, seg::Cubic, seg::Hermite,
                             seg::BranchInverse, seg::Compose, seg::Sum, seg::Min>;

struct Piece {
  double start;
  Segment segment;
};

// Piecewise closed-form scalar map on [0, inf). Class-K membership is a
// property checked on grids (check_class_k), not enforced at construction,
// so non-monotone building blocks such as the cubic rho can be represented.
class ComparisonFunction {
 public:
  explicit ComparisonFunction(std::vector<Piece> pieces);

  static ComparisonFunction identity();
  static ComparisonFunction affine(double slope, double intercept = 0.0);
  static ComparisonFunction cubic(std::array<double, 4> c);
  static ComparisonFunction piecewise_linear(std::span<const double> x,
                                             std::span<const double> y,
                                             double tail_slope);
  // Hermite pieces through the knots, then an affine tail with the last slope.
  static ComparisonFunction hermite(std::vector<double> x, std::vector<double> y,
                                    std::vector<double> d);
  static ComparisonFunction branch_inverse(const ComparisonFunction& of,
                                           double lo, double hi,
                                           double input_scale = 1.0);
  static ComparisonFunction compose(const ComparisonFunction& outer,
                                    const ComparisonFunction& inner);
  static ComparisonFunction sum(
      std::vector<std::pair<double, ComparisonFunction>> terms);
  static ComparisonFunction minimum(std::vector<ComparisonFunction> fs);
  static ComparisonFunction scaled(double w, const ComparisonFunction& f);

  double operator()(double s) const;
  void eval_many(std::span<const double> s, std::span<double> out) const;
  std::vector<double> eval_many(std::span<const double> s) const;

  // Value of the piece that ends at s (s itself when s is not a breakpoint).
  double left_limit(double s) const;
  double derivative(double s) const;
  double limit_at_infinity() const { return limit_; }
  const std::vector<Piece>& pieces() const { return *pieces_; }
  std::size_t piece_index(double s) const;

  // Largest disagreement between adjacent pieces at shared breakpoints.
  double max_seam_gap() const;

 private:
  std::shared_ptr<const std::vector<Piece>> pieces_;
  double limit_;
};

struct ClassKReport {
  bool ok;
  double where;  // first offending grid point, or NaN
  const char* reason;
};

// f(0) = 0 and strictly increasing on the supplied (sorted) grid.
ClassKReport check_class_k(const ComparisonFunction& f, std::span<const double> grid);

struct JumpPoint {
  double location;
  double left;
  double right;
};

struct GainBranch {
  double start;
  ComparisonFunction fn;
};

// Monotone gain with upward jumps; each branch covers [start_k, start_{k+1}).
// Evaluation at a jump returns the right limit.
class PiecewiseGain {
 public:
  explicit PiecewiseGain(std::vector<GainBranch> branches);

  double operator()(double s) const;
  double left_limit(double s) const;
  void eval_many(std::span<const double> s, std::span<double> out) const;
  double limit_at_infinity() const;
  const std::vector<GainBranch>& branches() const { return branches_; }
  const std::vector<JumpPoint>& jumps() const { return jumps_; }
  std::size_t branch_index(double s) const;

 private:
  std::vector<GainBranch> branches_;
  std::vector<JumpPoint> jumps_;
};

// Either a continuous comparison function or a piecewise gain with jumps.
class Gain {
 public:
  Gain(ComparisonFunction f) : v_(std::move(f)) {}  // NOLINT(google-explicit-constructor)
  Gain(PiecewiseGain g) : v_(std::move(g)) {}       // NOLINT(google-explicit-constructor)

  double operator()(double s) const;
  double left_limit(double s) const;
  void eval_many(std::span<const double> s, std::span<double> out) const;
  std::vector<double> eval_many(std::span<const double> s) const;
  double limit_at_infinity() const;

  bool is_function() const { return std::holds_alternative<ComparisonFunction>(v_); }
  const ComparisonFunction* function() const { return std::get_if<ComparisonFunction>(&v_); }
  const PiecewiseGain* piecewise() const { return std::get_if<PiecewiseGain>(&v_); }

 private:
  std::variant<ComparisonFunction, PiecewiseGain> v_;
};

}  // namespace rsg
