#include "rsg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bisection.hpp"
#include "rsg/errors.hpp"
#include "rsg/kernels.hpp"

namespace rsg {

bool Interval::contains(double s) const {
  const bool above = lo_open ? s > lo : s >= lo;
  const bool below = hi_open ? s < hi : s <= hi;
  return above && below;
}

std::vector<double> make_grid(const Interval& iv, std::size_t n, GridKind kind) {
  if (n < 1) throw DomainError("grid needs at least one point");
  if (!(iv.hi > iv.lo) || !std::isfinite(iv.hi)) {
    if (!(iv.hi == iv.lo && !iv.lo_open && !iv.hi_open)) throw DomainError("empty or unbounded grid interval");
  }
  const std::size_t ol = iv.lo_open ? 1 : 0;
  const std::size_t oh = iv.hi_open ? 1 : 0;
  const double parts = static_cast<double>(n - 1 + ol + oh);
  std::vector<double> g(n);
  if (parts == 0.0) {
    g[0] = iv.lo;
    return g;
  }
  if (kind == GridKind::uniform) {
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = iv.lo + (iv.hi - iv.lo) * (static_cast<double>(i + ol) / parts);
    }
  } else {
    const double a = iv.lo > 0.0 ? iv.lo : iv.hi * 1e-8;
    const double ratio = std::log(iv.hi / a);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = a * std::exp(ratio * (static_cast<double>(i + ol) / parts));
    }
    if (!iv.hi_open) g[n - 1] = iv.hi;
    if (!iv.lo_open && iv.lo > 0.0) g[0] = iv.lo;
  }
  return g;
}

const char* to_string(Orientation o) {
  return o == Orientation::gamma_after_delta ? "gamma-after-delta" : "delta-after-gamma";
}

const char* to_string(TailComparator c) {
  return c == TailComparator::affine_beats_cube_root ? "affine-beats-cube-root"
                                                     : "affine-beats-affine";
}

double invert(const ComparisonFunction& f, double y, double lo, double hi) {
  const double s = detail::bisect(f, y, lo, hi);
  if (std::fabs(f(s) - y) > 1e-10 * std::max(1.0, std::fabs(y))) {
    std::ostringstream os;
    os.precision(17);
    os << "inversion residual too large at y = " << y;
    throw NonConvergence(os.str());
  }
  return s;
}

namespace {

MarginReport reduce(const Interval& iv, const std::vector<double>& grid,
                    const std::vector<double>& margin) {
  MarginReport r;
  r.interval = iv;
  r.grid_size = grid.size();
  const auto am = kernels::active().argmin(margin.data(), margin.size());
  r.min_margin = am.value;
  r.argmin = grid[am.index];
  bool in_run = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(margin[i] > 0.0)) {
      ++r.violation_count;
      if (!in_run) r.violation_runs.emplace_back(grid[i], grid[i]);
      r.violation_runs.back().second = grid[i];
      in_run = true;
    } else {
      in_run = false;
    }
  }
  r.passed = r.violation_count == 0;
  return r;
}

}  // namespace

MarginReport gap_margin(const Gain& a, const Gain& b, const Interval& iv, std::size_t grid_n,
                        GridKind kind) {
  const auto grid = make_grid(iv, grid_n, kind);
  const auto va = a.eval_many(grid);
  const auto vb = b.eval_many(grid);
  std::vector<double> m(grid.size());
  kernels::active().sub(va.data(), vb.data(), m.data(), m.size());
  return reduce(iv, grid, m);
}

MarginReport sandwich_margin(const Gain& lower, const Gain& mid, const Gain& upper,
                             const Interval& iv, std::size_t grid_n) {
  if (grid_n < 2) throw DomainError("sandwich_margin needs grid_n >= 2");
  if (!(iv.hi > iv.lo)) throw DomainError("sandwich_margin on empty interval");
  const auto grid = make_grid(iv, grid_n);
  const auto lo = lower.eval_many(grid);
  const auto mi = mid.eval_many(grid);
  const auto up = upper.eval_many(grid);
  const auto& k = kernels::active();
  std::vector<double> a(grid.size()), b(grid.size());
  k.sub(mi.data(), lo.data(), a.data(), a.size());
  k.sub(up.data(), mi.data(), b.data(), b.size());
  k.vmin(a.data(), b.data(), b.size());
  return reduce(iv, grid, b);
}

namespace {

// q(x) = A x^2 + B x + C >= 0 for all x >= x0.
bool quadratic_nonneg_from(double A, double B, double C, double x0) {
  auto q = [&](double x) { return (A * x + B) * x + C; };
  if (A < 0.0) return false;
  if (A == 0.0) return B >= 0.0 && q(x0) >= 0.0;
  const double xv = std::max(x0, -B / (2.0 * A));
  return q(xv) >= 0.0;
}

struct UpperBound {
  bool cube_root;   // gamma(u) <= kappa u^{1/3} + d   or   a u + b
  double kappa, d;  // cube-root family
  double a, b;      // affine family
  double valid_from;
  std::string text;
};

const ComparisonFunction* last_function(const Gain& g) {
  if (const auto* f = g.function()) return f;
  return &g.piecewise()->branches().back().fn;
}

double last_start(const Gain& g) {
  if (const auto* f = g.function()) return f->pieces().back().start;
  const auto& br = g.piecewise()->branches().back();
  return std::max(br.start, br.fn.pieces().back().start);
}

std::optional<UpperBound> gamma_bound(const Gain& gamma) {
  const ComparisonFunction* f = last_function(gamma);
  const Piece& p = f->pieces().back();
  const double from = last_start(gamma);
  char buf[256];
  if (const auto* a = std::get_if<seg::Affine>(&p.segment)) {
    UpperBound u{false, 0, 0, a->slope, a->v0 - a->slope * p.start, from, ""};
    std::snprintf(buf, sizeof buf, "gamma(u) = %.6g u + %.6g", u.a, u.b);
    u.text = buf;
    return u;
  }
  const auto* bi = std::get_if<seg::BranchInverse>(&p.segment);
  if (bi == nullptr || !std::isinf(bi->hi)) return std::nullopt;
  const Piece& inner = bi->of->pieces().back();
  const auto* c = std::get_if<seg::Cubic>(&inner.segment);
  if (c == nullptr || !(c->c[3] > 0.0) || inner.start > bi->lo) return std::nullopt;
  const double c0 = c->c[0], c1 = c->c[1], c2 = c->c[2], c3 = c->c[3];
  // c(x) >= c3 (x - d)^3 on [lo, inf) gives c^{-1}(y) <= (y / c3)^{1/3} + d.
  for (int k = 0; k <= 80; ++k) {
    const double d = 0.25 * k;
    if (quadratic_nonneg_from(c2 + 3.0 * c3 * d, c1 - 3.0 * c3 * d * d, c0 + c3 * d * d * d, bi->lo)) {
      UpperBound u{true, std::cbrt(bi->input_scale / c3), d, 0, 0, from, ""};
      std::snprintf(buf, sizeof buf, "gamma(u) <= (%.6g u)^(1/3) + %.6g", bi->input_scale / c3, d);
      u.text = buf;
      return u;
    }
  }
  return std::nullopt;
}

struct AffineLower {
  double a, b, valid_from;
  std::string text;
};

// delta^{-1}(u) = a u + b exactly for u >= valid_from.
std::optional<AffineLower> delta_inverse_affine(const Gain& delta) {
  const ComparisonFunction* f = last_function(delta);
  const Piece& p = f->pieces().back();
  char buf[256];
  if (const auto* a = std::get_if<seg::Affine>(&p.segment)) {
    if (!(a->slope > 0.0)) return std::nullopt;
    AffineLower l{1.0 / a->slope, p.start - a->v0 / a->slope, a->v0, ""};
    std::snprintf(buf, sizeof buf, "delta^-1(u) = %.6g u + %.6g", l.a, l.b);
    l.text = buf;
    return l;
  }
  const auto* bi = std::get_if<seg::BranchInverse>(&p.segment);
  if (bi == nullptr || !std::isinf(bi->hi)) return std::nullopt;
  const Piece& inner = bi->of->pieces().back();
  const auto* aff = std::get_if<seg::Affine>(&inner.segment);
  if (aff == nullptr || !(aff->slope > 0.0)) return std::nullopt;
  // delta(s) = of^{-1}(k s), so delta^{-1}(u) = of(u) / k.
  const double k = bi->input_scale;
  AffineLower l{aff->slope / k, (aff->v0 - aff->slope * inner.start) / k,
                std::max(inner.start, bi->lo), ""};
  std::snprintf(buf, sizeof buf, "delta^-1(u) = %.6g u + %.6g", l.a, l.b);
  l.text = buf;
  return l;
}

}  // namespace

TailProof prove_tail(const Gain& gamma, const Gain& delta, Orientation o,
                     const TailCertificate& cert) {
  TailProof proof;
  const double u0 = o == Orientation::delta_after_gamma ? cert.threshold : delta(cert.threshold);
  proof.from = cert.threshold;
  const auto ub = gamma_bound(gamma);
  const auto lb = delta_inverse_affine(delta);
  if (!ub || !lb) {
    proof.detail = "gain tails are not in a built-in family";
    return proof;
  }
  const bool wants_cube = cert.comparator == TailComparator::affine_beats_cube_root;
  if (ub->cube_root != wants_cube) {
    proof.detail = std::string("comparator ") + to_string(cert.comparator) +
                   " does not match the gamma tail (" + ub->text + ")";
    return proof;
  }
  if (u0 < ub->valid_from || u0 < lb->valid_from) {
    std::ostringstream os;
    os << "threshold maps to u = " << u0 << " below the affine/closed-form tails (gamma from "
       << ub->valid_from << ", delta^-1 from " << lb->valid_from << ")";
    proof.detail = os.str();
    return proof;
  }
  double umin = u0;
  double gap = 0.0;
  if (wants_cube) {
    // h(u) = a u + b - kappa u^{1/3} - d is convex; minimum at max(u0, u*).
    const double ustar = std::pow(ub->kappa / (3.0 * lb->a), 1.5);
    umin = std::max(u0, ustar);
    gap = lb->a * umin + lb->b - ub->kappa * std::cbrt(umin) - ub->d;
    proof.holds = gap > 0.0;
  } else {
    gap = (lb->a - ub->a) * u0 + (lb->b - ub->b);
    proof.holds = lb->a >= ub->a && gap > 0.0;
  }
  std::ostringstream os;
  os.precision(6);
  os << "for u >= " << u0 << ": " << ub->text << ", " << lb->text << "; min gap " << gap
     << " at u = " << umin;
  proof.detail = os.str();
  return proof;
}

MarginReport small_gain_margin(const Gain& gamma, const Gain& delta, const Interval& iv,
                               Orientation o, std::size_t grid_n, const SmallGainOptions& opts) {
  Interval sampled = iv;
  std::optional<TailProof> tail;
  if (!iv.bounded()) {
    if (!opts.tail) throw AsymptoticUndecided("unbounded interval without a tail certificate");
    if (opts.tail->threshold > opts.s_max) {
      throw AsymptoticUndecided("tail certificate threshold lies beyond s_max");
    }
    tail = prove_tail(gamma, delta, o, *opts.tail);
    if (!tail->holds) throw AsymptoticUndecided("tail certificate failed: " + tail->detail);
    sampled.hi = opts.s_max;
    sampled.hi_open = false;
  }
  const auto grid = make_grid(sampled, grid_n, opts.grid);
  std::vector<double> comp;
  if (o == Orientation::gamma_after_delta) {
    comp = gamma.eval_many(delta.eval_many(grid));
  } else {
    comp = delta.eval_many(gamma.eval_many(grid));
  }
  std::vector<double> m(grid.size());
  kernels::active().sub(grid.data(), comp.data(), m.data(), m.size());
  auto r = reduce(iv, grid, m);
  r.tail = tail;
  return r;
}

}  // namespace rsg
