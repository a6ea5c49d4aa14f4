#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rsg/certificates.hpp"
#include "rsg/errors.hpp"

namespace rsg {

const char* to_string(Role r) { return r == Role::local ? "local" : "global"; }

double MergedLyapunov::operator()(const Vec& x, const Vec& z) const {
  return std::max(sigma(V.storage(x)), W.storage(z));
}

double MergedLyapunov::decay_envelope(const Vec& x, const Vec& z) const {
  return std::min(sigma.derivative(V.storage(x)) * V.decay(x), W.decay(z));
}

MergedLyapunov build_merged_lyapunov(const BridgeSpec& spec, const IssCertificate& V,
                                     const IssCertificate& W, Role role,
                                     SmoothBridge* bridge_out) {
  auto bridge = build_smooth_bridge(spec.lower, spec.upper, spec.knots);
  MergedLyapunov U{bridge.sigma, V, W, role, 0.0};
  if (bridge_out != nullptr) *bridge_out = std::move(bridge);
  return U;
}

std::vector<std::pair<Vec, Vec>> level_boundary(
    const std::function<double(const Vec&, const Vec&)>& U, std::size_t n, std::size_t m,
    double c, std::size_t rays) {
  std::vector<std::pair<Vec, Vec>> out;
  auto at = [&](double r, double cs, double sn) {
    Vec x(n, 0.0), z(m, 0.0);
    x[0] = r * cs;
    z[0] = r * sn;
    return std::make_pair(x, z);
  };
  for (std::size_t k = 0; k < rays; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
    const double cs = std::cos(th), sn = std::sin(th);
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const auto [x, z] = at(hi, cs, sn);
      if (U(x, z) > c) break;
      hi *= 2.0;
    }
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = lo + (hi - lo) * 0.5;
      const auto [x, z] = at(mid, cs, sn);
      (U(x, z) <= c ? lo : hi) = mid;
    }
    out.push_back(at(lo, cs, sn));
  }
  return out;
}

bool containment_holds(const MergedLyapunov& U, double c, double M, Role role) {
  const std::size_t n = 1, m = 1;
  if (role == Role::local) {
    const auto pts = level_boundary([&](const Vec& x, const Vec& z) { return U(x, z); }, n, m, c);
    return std::all_of(pts.begin(), pts.end(), [&](const auto& p) {
      return U.V.storage(p.first) <= M * (1.0 + 1e-9) + 1e-15;
    });
  }
  // Boundary of {V <= M} x {0}: the two rays along the x axis.
  const auto pts = level_boundary([&](const Vec& x, const Vec&) { return U.V.storage(x); }, n, m,
                                  M, 2);
  for (const auto& [x, z] : pts) {
    if (!(U(x, Vec(m, 0.0)) <= c * (1.0 + 1e-12))) return false;
  }
  return true;
}

double level_constant(const MergedLyapunov& U, double M, Role role) {
  const double c = U.sigma(M);
  if (!containment_holds(U, c, M, role)) {
    std::ostringstream os;
    os << to_string(role) << " containment failed for c = " << c << ", M = " << M;
    throw ContainmentFailed(os.str());
  }
  return c;
}

namespace {

const ComparisonFunction& as_function(const Gain& g, const char* what) {
  if (const auto* f = g.function()) return *f;
  throw DomainError(std::string(what) + " must be a continuous comparison function");
}

std::vector<double> knots_for(const Problem& p) {
  return p.sigma_knots.empty() ? log_knots(1e-4, 10.0, 96) : p.sigma_knots;
}

}  // namespace

LocalBridge build_local_bridge(const Problem& p) {
  const auto& delta = as_function(p.bundle.cross_gain, "cross gain");
  const auto& gl = as_function(p.bundle.local_gain, "local gain");
  auto gt = build_kinf_bridge(delta, gl, 0.0, p.bundle.M_ell);
  auto sb = build_smooth_bridge(delta, gt.fn, knots_for(p));
  MergedLyapunov U{sb.sigma, p.V, p.W, Role::local, 0.0};
  U.level_constant = level_constant(U, p.bundle.M_ell, Role::local);
  return {std::move(gt), std::move(sb), std::move(U)};
}

GlobalBridge build_global_bridge(const Problem& p) {
  const auto& delta = as_function(p.bundle.cross_gain, "cross gain");
  const auto& gg = as_function(p.bundle.global_gain, "global gain");
  const auto grid = make_grid(Interval::closed(p.bundle.M_g, p.s_max), p.grid_n, GridKind::geometric);
  const auto comp = gg.eval_many(delta.eval_many(grid));
  double p_eff = p.bundle.M_g;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(comp[i] < grid[i])) p_eff = 1.01 * grid[i];
  }
  auto gt = build_kinf_bridge(delta, gg, p_eff, p.s_max);
  auto sb = build_smooth_bridge(delta, gt.fn, knots_for(p));
  MergedLyapunov U{sb.sigma, p.V, p.W, Role::global, 0.0};
  U.level_constant = level_constant(U, p.bundle.M_g, Role::global);
  return {p_eff, std::move(gt), std::move(sb), std::move(U)};
}

}  // namespace rsg
