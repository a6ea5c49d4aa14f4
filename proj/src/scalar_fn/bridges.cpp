#include "rsg/bridges.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsg/algebra.hpp"
#include "rsg/errors.hpp"

namespace rsg {

KinfBridge build_kinf_bridge(const ComparisonFunction& alpha, const ComparisonFunction& beta,
                             double p, double q, std::optional<double> epsilon) {
  if (!(p >= 0.0) || !(q > p)) throw DomainError("kinf bridge needs 0 <= p < q");
  const double eps = epsilon.value_or(0.01 * (q - p));
  if (!(eps > 0.0)) throw DomainError("kinf bridge needs epsilon > 0");
  const double b = beta.limit_at_infinity();
  if (!(q + eps < b)) {
    std::ostringstream os;
    os << "q + epsilon = " << q + eps << " is not below lim beta = " << b;
    throw EpsilonTooLarge(os.str());
  }

  const Interval hyp = p == 0.0 ? Interval::left_open(0.0, q) : Interval::closed(p, q);
  for (double s : make_grid(hyp, 512)) {
    if (!(beta(alpha(s)) < s)) {
      std::ostringstream os;
      os.precision(17);
      os << "beta(alpha(s)) >= s at s = " << s;
      throw HypothesisViolated(os.str());
    }
  }

  const auto id = ComparisonFunction::identity();
  const auto beta_inv = ComparisonFunction::branch_inverse(beta, 0.0, kInf);
  const auto middle = ComparisonFunction::sum(
      {{1.0, alpha},
       {1.0, ComparisonFunction::minimum(
                 {id, ComparisonFunction::sum({{0.5, beta_inv}, {-0.5, alpha}})})}});

  double K = 0.0;
  std::vector<Piece> pieces;
  if (p > 0.0) {
    K = std::min(p, 0.5 * (beta_inv(p) - alpha(p)));
    pieces.push_back(
        {0.0, seg::Sum{{{1.0, std::make_shared<const ComparisonFunction>(alpha)},
                        {1.0, std::make_shared<const ComparisonFunction>(
                                  ComparisonFunction::minimum(
                                      {id, ComparisonFunction::affine(0.0, K)}))}}}});
  }
  pieces.push_back({p, middle.pieces().front().segment});
  const double A = middle(q);
  const double B = (alpha(q + eps) + (q + eps) - A) / eps;
  if (!(B > 0.0)) throw EpsilonTooLarge("continuity slope B is not positive");
  pieces.push_back({q, seg::Affine{A, B}});
  pieces.push_back({q + eps, seg::Sum{{{1.0, std::make_shared<const ComparisonFunction>(alpha)},
                                       {1.0, std::make_shared<const ComparisonFunction>(id)}}}});
  return KinfBridge{ComparisonFunction(std::move(pieces)), p, q, eps, K, A, B};
}

std::vector<double> log_knots(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_knots needs 0 < lo < hi, n >= 2");
  std::vector<double> k(n);
  const double r = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = lo * std::exp(r * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  k.back() = hi;
  return k;
}

std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("monotone_slopes needs matching knots");
  std::vector<double> h(n - 1), del(n - 1), d(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    del[k] = (y[k + 1] - y[k]) / h[k];
    if (!(h[k] > 0.0) || !(del[k] > 0.0)) {
      throw DomainError("monotone_slopes needs strictly increasing data");
    }
  }
  if (n == 2) {
    d[0] = d[1] = del[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    const double est = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    return std::clamp(est, 0.5 * d0, 2.5 * d0);
  };
  d[0] = end_slope(h[0], h[1], del[0], del[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  return d;
}

namespace {

constexpr int kMaxRepairRounds = 8;

struct Fit {
  ComparisonFunction sigma;
  std::vector<double> xs;
};

Fit fit_sigma(const Gain& lower, const Gain& upper, const std::vector<double>& knots) {
  std::vector<double> x{0.0}, y{0.0};
  const auto lo = lower.eval_many(knots);
  const auto up = upper.eval_many(knots);
  double prev = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double m = std::sqrt(lo[i] * up[i]);
    const double v = std::max(m, prev + 1e-12 * knots[i]);
    x.push_back(knots[i]);
    y.push_back(v);
    prev = v;
  }
  auto d = monotone_slopes(x, y);
  auto xs = x;
  return Fit{ComparisonFunction::hermite(std::move(x), std::move(y), std::move(d)), xs};
}

constexpr int kPerInterval = 32;

void add_breakpoints(const ComparisonFunction& f, std::vector<double>& out) {
  for (const auto& p : f.pieces()) {
    if (p.start > 0.0) out.push_back(p.start);
  }
}

// Piece starts of a bound; the bridge is most likely to cross a bound next to
// its kinks.
std::vector<double> breakpoints(const Gain& g) {
  std::vector<double> out;
  if (const auto* f = g.function()) {
    add_breakpoints(*f, out);
  } else {
    for (const auto& b : g.piecewise()->branches()) {
      if (b.start > 0.0) out.push_back(b.start);
      add_breakpoints(b.fn, out);
    }
  }
  return out;
}

// kPerInterval points inside each knot interval, a geometric run towards 0,
// a tail out to `reach` (10x the last requested knot) and the bound kinks
// with a point on either side. Sorted and unique.
std::vector<double> verification_grid(const std::vector<double>& xs, double reach,
                                      const std::vector<double>& kinks) {
  std::vector<double> g;
  for (int j = 20; j >= 1; --j) g.push_back(xs[1] * std::ldexp(1.0, -j));
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
    for (int j = 0; j < kPerInterval; ++j) {
      g.push_back(xs[k] + (xs[k + 1] - xs[k]) * (static_cast<double>(j) / kPerInterval));
    }
  }
  const double last = xs.back();
  const double r = std::max(reach / last, 1.0);
  for (int j = 0; j <= 20; ++j) g.push_back(last * std::pow(r, j / 20.0));
  for (double b : kinks) {
    if (b > reach) continue;
    for (double f : {1.0 - 1e-6, 1.0, 1.0 + 1e-6, 1.0 + 1e-4, 1.0 + 1e-3}) g.push_back(b * f);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

SmoothBridge build_smooth_bridge(const Gain& lower, const Gain& upper, std::vector<double> knots) {
  if (knots.size() < 2) throw DomainError("smooth bridge needs at least two knots");
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  if (!(knots.front() > 0.0)) throw DomainError("smooth bridge knots must be positive");

  const double reach = 10.0 * knots.back();
  auto kinks = breakpoints(lower);
  for (double b : breakpoints(upper)) kinks.push_back(b);
  for (int round = 0;; ++round) {
    Fit fit = fit_sigma(lower, upper, knots);
    const auto grid = verification_grid(fit.xs, reach, kinks);
    const auto lo = lower.eval_many(grid);
    const auto up = upper.eval_many(grid);
    const auto sg = fit.sigma.eval_many(grid);
    double min_margin = kInf;
    // Worst violation per knot interval, keyed by the interval's left knot.
    std::vector<std::pair<double, double>> worst(fit.xs.size(), {0.0, kInf});
    bool ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(up[i] - lo[i] > 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "upper - lower <= 1e-12 at s = " << grid[i];
        throw GapClosed(os.str());
      }
      const double m = std::min(sg[i] - lo[i], up[i] - sg[i]);
      min_margin = std::min(min_margin, m);
      const bool monotone = i == 0 || sg[i] > sg[i - 1];
      if (!(m > 0.0) || !monotone) {
        ok = false;
        const auto it = std::upper_bound(fit.xs.begin(), fit.xs.end(), grid[i]);
        const std::size_t k = static_cast<std::size_t>(it - fit.xs.begin()) - 1;
        if (m < worst[k].second) worst[k] = {grid[i], m};
      }
    }
    if (ok) return SmoothBridge{fit.sigma, knots, round, min_margin};
    if (round == kMaxRepairRounds) {
      std::ostringstream os;
      os << "sandwich still violated after " << kMaxRepairRounds
         << " repair rounds (min margin " << min_margin << ")";
      throw MonotonicityRepairFailed(os.str());
    }
    for (const auto& [s, m] : worst) {
      if (m < kInf && s > 0.0) knots.push_back(s);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  }
}

}  // namespace rsg
