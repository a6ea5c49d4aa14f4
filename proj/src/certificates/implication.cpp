#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsg/certificates.hpp"
#include "rsg/errors.hpp"

namespace rsg {
namespace {

// Largest r in [0, cap] with pred(r) true, for pred monotone (true then false).
double sup_where(const std::function<bool(double)>& pred, double cap) {
  if (pred(cap)) return cap;
  double lo = 0.0, hi = cap;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = lo + (hi - lo) * 0.5;
    (pred(mid) ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

CheckReport check_regional_implication(const InterconnectedSystem& sys, const IssCertificate& V,
                                       const IssCertificate& W, Subsystem which, const Gain& gain,
                                       const Region& region, const ImplicationOptions& opts) {
  const auto& so = opts.sampler;
  double rx = so.z_box;
  if (region.kind == RegionKind::sublevel) {
    rx = sup_where([&](double r) { return V.lower(r) <= region.M; }, 1e6);
  } else if (region.kind == RegionKind::superlevel) {
    rx = sup_where([&](double r) { return V.lower(r) <= so.superlevel_cap; }, 1e6);
  }
  double rz = so.z_box;
  if (which == Subsystem::x && region.kind == RegionKind::sublevel) {
    // gain(W(z)) >= gain(W.lower(|z|)) > M leaves the antecedent unsatisfiable.
    rz = sup_where([&](double r) { return gain(W.lower(r)) <= region.M; }, so.z_box);
  }

  CheckReport rep;
  rep.id = which == Subsystem::x ? "implication:x" : "implication:z";
  rep.region = region.describe() + (which == Subsystem::x ? " (gain on W)" : " (gain on V)");
  const auto pts = sobol_points(sys.n + sys.m, so.samples, so.seed);
  std::size_t active = 0;
  double worst = kInf;
  for (const auto& u : pts) {
    Vec x(sys.n), z(sys.m);
    for (std::size_t i = 0; i < sys.n; ++i) x[i] = rx * (2.0 * u[i] - 1.0);
    for (std::size_t i = 0; i < sys.m; ++i) z[i] = rz * (2.0 * u[sys.n + i] - 1.0);
    const double v = V.storage(x);
    if (!region.contains(v)) continue;
    if (region.kind == RegionKind::superlevel && v > so.superlevel_cap) continue;
    ++rep.samples;
    const double w = W.storage(z);
    const bool antecedent = which == Subsystem::x ? v >= gain(w) : w >= gain(v);
    if (!antecedent) continue;
    ++active;
    double dini;
    if (opts.analytic) {
      dini = opts.analytic(x, z);
    } else if (which == Subsystem::x) {
      dini = dini_forward(V.storage, [&](const Vec& y) { return sys.f(y, z); }, x).value;
    } else {
      dini = dini_forward(W.storage, [&](const Vec& y) { return sys.g(x, y); }, z).value;
    }
    const double decay = which == Subsystem::x ? V.decay(x) : W.decay(z);
    const double margin = -decay - dini;
    worst = std::min(worst, margin);
    if (margin < -opts.tol_dini) {
      ++rep.violation_count;
      if (rep.violations.size() < opts.keep) {
        Vec s = x;
        s.insert(s.end(), z.begin(), z.end());
        rep.violations.push_back({std::move(s), margin});
      }
    }
  }
  if (rep.samples == 0) throw EmptySample("region sampler produced no states in " + rep.region);
  if (active > 0) rep.min_margin = worst;
  std::ostringstream os;
  os << active << " of " << rep.samples << " samples satisfy the antecedent; box |x| <= "
     << format_number(rx) << ", |z| <= " << format_number(rz) << "; "
     << (opts.analytic ? "analytic" : "numerical") << " Dini derivative";
  rep.notes.push_back(os.str());
  return rep;
}

}  // namespace rsg
