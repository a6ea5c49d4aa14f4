#include "bisection.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "rsg/errors.hpp"
#include "rsg/kernels.hpp"

namespace rsg::detail {
namespace {

double edge_tol(double y) { return 1e-12 * std::max(1.0, std::fabs(y)); }

[[noreturn]] void bracket_fail(double y, double lo, double hi, double flo, double fhi) {
  std::ostringstream os;
  os.precision(17);
  os << "target " << y << " outside [f(" << lo << "), f(" << hi << ")] = [" << flo
     << ", " << fhi << "]";
  throw BracketError(os.str());
}

// Prepared bracket for one target. `done` means the answer is already known.
struct Lane {
  double lo;
  double hi;
  bool done;
  double answer;
};

Lane prepare(const ComparisonFunction& f, double y, double lo, double hi, double flo,
             double fhi) {
  if (y == flo) return {lo, lo, true, lo};
  if (y < flo) {
    if (flo - y <= edge_tol(y)) return {lo, lo, true, lo};
    bracket_fail(y, lo, hi, flo, fhi);
  }
  if (std::isinf(hi)) {
    double step = 1.0;
    double probe = lo + step;
    double fp = f(probe);
    while (fp < y) {
      lo = probe;
      step *= 2.0;
      if (step > 1e300) bracket_fail(y, lo, hi, flo, fp);
      probe = lo + step;
      fp = f(probe);
    }
    if (fp == y) return {probe, probe, true, probe};
    return {lo, probe, false, 0.0};
  }
  return {lo, hi, false, 0.0};
}

}  // namespace

double bisect(const ComparisonFunction& f, double y, double lo, double hi) {
  if (std::isnan(y)) throw BracketError("bisection target is NaN");
  const double flo = f(lo);
  const double fhi = std::isfinite(hi) ? f(hi) : kInf;
  if (std::isfinite(hi)) {
    if (y == fhi) return hi;
    if (y > fhi) {
      if (y - fhi <= edge_tol(y)) return hi;
      bracket_fail(y, lo, hi, flo, fhi);
    }
  }
  Lane l = prepare(f, y, lo, hi, flo, fhi);
  if (l.done) return l.answer;
  double a = l.lo;
  double b = l.hi;
  for (int it = 0; it < kMaxBisection; ++it) {
    if (b - a <= bisect_width_tol(b)) break;
    const double mid = a + (b - a) * 0.5;
    if (f(mid) < y) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return a + (b - a) * 0.5;
}

void bisect_many(const ComparisonFunction& f, std::span<const double> y, double lo,
                 double hi, std::span<double> out) {
  const std::size_t n = y.size();
  if (n == 0) return;
  const double flo = f(lo);
  const double fhi = std::isfinite(hi) ? f(hi) : kInf;
  std::vector<double> a(n), b(n);
  std::vector<std::size_t> open;
  open.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = y[i];
    if (std::isnan(yi)) throw BracketError("bisection target is NaN");
    if (std::isfinite(hi)) {
      if (yi == fhi) {
        out[i] = hi;
        continue;
      }
      if (yi > fhi) {
        if (yi - fhi <= edge_tol(yi)) {
          out[i] = hi;
          continue;
        }
        bracket_fail(yi, lo, hi, flo, fhi);
      }
    }
    Lane l = prepare(f, yi, lo, hi, flo, fhi);
    if (l.done) {
      out[i] = l.answer;
      continue;
    }
    a[i] = l.lo;
    b[i] = l.hi;
    open.push_back(i);
  }
  const std::vector<std::size_t> started = open;

  const auto& k = kernels::active();
  std::vector<double> ga, gb, gy, mid, fmid;
  for (int it = 0; it < kMaxBisection && !open.empty(); ++it) {
    std::size_t w = 0;
    for (std::size_t i : open) {
      if (b[i] - a[i] > bisect_width_tol(b[i])) open[w++] = i;
    }
    open.resize(w);
    if (w == 0) break;
    ga.resize(w);
    gb.resize(w);
    gy.resize(w);
    mid.resize(w);
    fmid.resize(w);
    for (std::size_t j = 0; j < w; ++j) {
      ga[j] = a[open[j]];
      gb[j] = b[open[j]];
      gy[j] = y[open[j]];
    }
    k.bisect_mid(ga.data(), gb.data(), mid.data(), w);
    f.eval_many(mid, fmid);
    k.bisect_update(ga.data(), gb.data(), mid.data(), fmid.data(), gy.data(), w);
    for (std::size_t j = 0; j < w; ++j) {
      a[open[j]] = ga[j];
      b[open[j]] = gb[j];
    }
  }
  for (std::size_t i : started) out[i] = a[i] + (b[i] - a[i]) * 0.5;
}

}  // namespace rsg::detail
