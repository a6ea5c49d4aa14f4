#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsg/certificates.hpp"
#include "rsg/errors.hpp"

namespace rsg {
namespace {

struct Link {
  const char* name;
  const ComparisonFunction* sigma_a;
  double c_a;
  const ComparisonFunction* sigma_b;
  double c_b;
};

CheckReport check_link(const Link& l, const IssCertificate& V, const IssCertificate& W,
                       std::size_t rays) {
  auto Ua = [&](const Vec& x, const Vec& z) { return std::max((*l.sigma_a)(V.storage(x)), W.storage(z)); };
  auto Ub = [&](const Vec& x, const Vec& z) { return std::max((*l.sigma_b)(V.storage(x)), W.storage(z)); };
  CheckReport r;
  r.id = l.name;
  r.samples = rays;
  double worst = -kInf;
  for (const auto& [x, z] : level_boundary(Ua, 1, 1, l.c_a, rays)) {
    const double excess = Ub(x, z) - l.c_b;
    worst = std::max(worst, excess);
    if (excess > 1e-12 * std::max(1.0, l.c_b)) {
      ++r.violation_count;
      if (r.violations.size() < 20) r.violations.push_back({{x[0], z[0]}, -excess});
    }
  }
  r.min_margin = -worst;
  std::ostringstream os;
  os << "{U <= " << format_number(l.c_a) << "} inside {U' <= " << format_number(l.c_b) << "}";
  r.region = os.str();
  return r;
}

}  // namespace

CheckReport check_inclusion_chain(const ComparisonFunction& sigma_hat_g,
                                  const ComparisonFunction& sigma_ell, const IssCertificate& V,
                                  const IssCertificate& W, double M_g, double M, double M_ell,
                                  std::size_t rays) {
  CheckReport r;
  r.id = "inclusion-chain";
  const Link links[] = {
      {"Omega(U^g, M^g) in Omega(U^g, M)", &sigma_hat_g, sigma_hat_g(M_g), &sigma_hat_g, sigma_hat_g(M)},
      {"Omega(U^g, M) in Omega(U_l, M)", &sigma_hat_g, sigma_hat_g(M), &sigma_ell, sigma_ell(M)},
      {"Omega(U_l, M) in Omega(U_l, M^l)", &sigma_ell, sigma_ell(M), &sigma_ell, sigma_ell(M_ell)},
  };
  for (const auto& l : links) r.parts.push_back(check_link(l, V, W, rays));
  const auto grid = make_grid(Interval::left_open(0.0, 10.0 * M_ell), 2000, GridKind::geometric);
  const auto a = sigma_hat_g.eval_many(grid);
  const auto b = sigma_ell.eval_many(grid);
  if (a == b) {
    r.parts[1].notes.push_back("boundary case: sigma^_g = sigma_l, the inclusion holds with equality");
  }
  r.notes.push_back("levels in V units: Omega(U, m) = {U <= sigma(m)}");
  return r;
}

Theorem2Result verify_theorem2(const Problem& p, const Theorem2Options& opts) {
  Theorem2Result out;
  auto& rep = out.report;
  rep.id = "theorem2";

  CheckReport a6;
  a6.id = "A6.thresholds";
  double Mg = p.bundle.M_g, Ml = p.bundle.M_ell;
  a6.min_margin = Ml - Mg;
  if (!(Mg < Ml)) {
    if (opts.threshold_swap && Mg != Ml) {
      std::swap(Mg, Ml);
      a6.notes.push_back("configuration note: M_g = " + format_number(p.bundle.M_g) +
                         " >= M_ell = " + format_number(p.bundle.M_ell) +
                         "; thresholds swapped to M_g = " + format_number(Mg) +
                         ", M_ell = " + format_number(Ml));
      a6.min_margin = Ml - Mg;
    } else {
      a6.violation_count = 1;
      a6.violations.push_back({{p.bundle.M_g, p.bundle.M_ell}, Ml - Mg});
      rep.parts.push_back(std::move(a6));
      return out;
    }
  }
  rep.parts.push_back(std::move(a6));
  out.M_g = Mg;
  out.M_ell = Ml;
  out.M = 0.5 * (Mg + Ml);

  Problem q = p;
  q.bundle.M_g = Mg;
  q.bundle.M_ell = Ml;
  const auto local = build_local_bridge(q);
  const auto global = build_global_bridge(q);
  const auto& delta = *p.bundle.cross_gain.function();
  const auto gamma_hat = ComparisonFunction::minimum({global.gamma_tilde.fn, local.sigma.sigma});
  const auto knots = p.sigma_knots.empty() ? log_knots(1e-4, 10.0, 96) : p.sigma_knots;
  const auto sigma_hat = build_smooth_bridge(delta, gamma_hat, knots);

  CheckReport order;
  order.id = "sigma-hat-below-sigma-ell";
  {
    const auto m = gap_margin(local.sigma.sigma, sigma_hat.sigma,
                              Interval::left_open(0.0, p.s_max), p.grid_n, GridKind::geometric);
    order.samples = m.grid_size;
    order.min_margin = m.min_margin;
    order.argmin = m.argmin;
    order.violation_count = m.violation_count;
    if (!m.passed) order.violations.push_back({{m.argmin}, m.min_margin});
  }
  rep.parts.push_back(std::move(order));

  auto chain = check_inclusion_chain(sigma_hat.sigma, local.sigma.sigma, p.V, p.W, Mg, out.M, Ml,
                                     opts.rays);
  rep.parts.push_back(std::move(chain));

  // Same numeric level on both sides, as the inclusion is printed.
  const Link same{"Omega_M(U^g) in Omega_M(U_l), same level", &sigma_hat.sigma, out.M,
                  &local.sigma.sigma, out.M};
  auto literal = check_link(same, p.V, p.W, opts.rays);
  literal.informational = true;
  if (literal.violation_count > 0) {
    literal.notes.push_back("reversed at equal levels: {U^g <= M} is the larger set");
  }
  rep.parts.push_back(std::move(literal));

  out.M_hat_g = sigma_hat.sigma(Mg);
  out.M_hat_ell = local.sigma.sigma(Ml);
  std::ostringstream os;
  os << "M = " << format_number(out.M) << ", M^_g = sigma^_g(M_g) = " << format_number(out.M_hat_g)
     << ", M^_l = sigma_l(M_l) = " << format_number(out.M_hat_ell) << ", Lemma-6 global p = "
     << format_number(global.p_eff);
  rep.notes.push_back(os.str());
  return out;
}

}  // namespace rsg
