#include "rsg/example.hpp"

#include <cmath>
#include <sstream>

#include "rsg/detail/formulas.hpp"
#include "rsg/errors.hpp"

namespace rsg::example {

const Constants& constants() {
  static const Constants c;
  return c;
}

namespace {
constexpr std::array<double, 4> kRhoCoeffs{0.0, 1.25, -2.0, 1.0};
}  // namespace

const ComparisonFunction& rho() {
  static const auto f = ComparisonFunction::cubic(kRhoCoeffs);
  return f;
}

double rho_branch_inverse(Branch b, double y) {
  if (b == Branch::lower) return invert(rho(), y, 0.0, 0.5);
  return invert(rho(), y, 5.0 / 6.0, kInf);
}

ComparisonFunction scaled_rho_inverse(Branch b) {
  const double lo = b == Branch::lower ? 0.0 : 5.0 / 6.0;
  const double hi = b == Branch::lower ? 0.5 : kInf;
  return ComparisonFunction::branch_inverse(rho(), lo, hi, 1.0 / 0.95);
}

const PiecewiseGain& gamma_capital() {
  static const PiecewiseGain g({{0.0, scaled_rho_inverse(Branch::lower)},
                                {constants().s1, scaled_rho_inverse(Branch::upper)}});
  return g;
}

const ComparisonFunction& gamma_ell() {
  static const ComparisonFunction f = [] {
    const auto& c = constants();
    const auto inv = scaled_rho_inverse(Branch::lower);
    const double at_M = inv(c.M_ell);
    // rho_-^{-1}(rho(1/2)) = 1/2; the bisected value keeps the seam exact.
    const double end = inv(c.s2);
    std::vector<Piece> pieces{inv.pieces().front(),
                              {c.s2, seg::Affine{end, (end - at_M) / (c.s2 - c.M_ell)}}};
    return ComparisonFunction(std::move(pieces));
  }();
  return f;
}

const ComparisonFunction& gamma_g() {
  static const ComparisonFunction f = [] {
    const auto& c = constants();
    const auto up = scaled_rho_inverse(Branch::upper);
    std::vector<Piece> pieces{{0.0, seg::Affine{0.0, (5.0 / 6.0) / c.s1}}, {c.s1, up.pieces().front().segment}};
    return ComparisonFunction(std::move(pieces));
  }();
  return f;
}

Knots default_delta_knots() {
  const double s1 = constants().s1;
  return {{0.0, 0.0},    {s1, 2.1 * s1},  {0.2215, 0.87}, {0.236, 0.95},
          {0.245, 1.15}, {0.3, 1.30},     {1.0, 2.20}};
}

Knots reference_delta_knots() {
  return {{0.0, 0.0}, {0.236, 0.4956}, {0.245, 1.10}, {1.0, 2.20}};
}

namespace {

[[noreturn]] void fail(const char* what, double s, double lhs, double rhs) {
  std::ostringstream os;
  os.precision(10);
  os << what << " violated at s = " << s << " (" << lhs << " vs " << rhs << ")";
  throw ValidationFailed(os.str());
}

void validate(const ComparisonFunction& dt) {
  const auto& c = constants();
  const auto& G = gamma_capital();
  const auto& gl = gamma_ell();
  constexpr std::size_t n = 4000;

  for (double s : make_grid(Interval::left_open(0.0, c.M_ell), n)) {
    if (!(dt(s) > gl(s))) fail("gamma_l(s) < delta~(s) on (0, M_l]", s, gl(s), dt(s));
  }
  for (double s : make_grid(Interval::closed(c.M_g, 100.0), n, GridKind::geometric)) {
    if (!(dt(s) > G(s))) fail("Gamma(s) < delta~(s) on [M_g, 100]", s, G(s), dt(s));
  }
  const auto inv = ComparisonFunction::branch_inverse(dt, 0.0, kInf);
  const auto tail = prove_tail(G, inv, Orientation::delta_after_gamma,
                               {10.0, TailComparator::affine_beats_cube_root});
  if (!tail.holds) throw ValidationFailed("tail certificate for Gamma < delta~ failed: " + tail.detail);
  for (double s : make_grid(Interval::open(c.s1, c.M_ell), n)) {
    if (!(dt(s) < G(s))) fail("delta~(s) < Gamma(s) on (s1, M_l)", s, dt(s), G(s));
  }
  for (double s : make_grid(Interval::left_open(0.0, 100.0), n, GridKind::geometric)) {
    if (!(dt(s) >= s)) fail("delta~(s) >= s", s, dt(s), s);
  }
  // Equilibria off the origin solve delta~(rho(x)) = x.
  for (double x : make_grid(Interval::left_open(0.0, 10.0), n)) {
    const double v = dt(rho()(x));
    if (!(v > x)) fail("no equilibrium: delta~(rho(x)) > x", x, v, x);
  }
}

}  // namespace

ComparisonFunction build_delta_tilde(const Knots& knots, double tail_slope) {
  if (knots.size() < 2 || knots.front() != std::pair<double, double>{0.0, 0.0}) {
    throw DomainError("delta~ knots must start at (0, 0)");
  }
  std::vector<double> x, y;
  for (const auto& [a, b] : knots) {
    x.push_back(a);
    y.push_back(b);
  }
  auto dt = ComparisonFunction::piecewise_linear(x, y, tail_slope);
  if (!check_class_k(dt, x).ok) throw ValidationFailed("delta~ knots are not strictly increasing");
  validate(dt);
  return dt;
}

const ComparisonFunction& delta_tilde() {
  static const auto f = build_delta_tilde(default_delta_knots());
  return f;
}

ComparisonFunction cross_gain(const ComparisonFunction& dt) {
  return ComparisonFunction::branch_inverse(dt, 0.0, kInf, 1.0 / (1.0 - constants().eps_z));
}

InterconnectedSystem example_system(const ComparisonFunction& dt) {
  auto sys = loop_system(rho(), dt);
  sys.check_equilibrium();
  return sys;
}

namespace {

// D+|y| along direction d.
double abs_dini(double y, double d) { return y != 0.0 ? detail::sign_of(y) * d : std::fabs(d); }

}  // namespace

DiniOracle dini_V_oracle() {
  // The drift is the cubic polynomial on all of R, not the class-K restriction.
  return [](const Vec& x, const Vec& z) {
    return abs_dini(x[0], z[0] - detail::cubic_at(x[0], kRhoCoeffs.data()));
  };
}

DiniOracle dini_W_oracle(const ComparisonFunction& dt) {
  return [dt](const Vec& x, const Vec& z) {
    return abs_dini(z[0], x[0] - detail::sign_of(z[0]) * dt(std::fabs(z[0])));
  };
}

Problem example_problem() { return example_problem(delta_tilde()); }

Problem example_problem(const ComparisonFunction& dt) {
  const auto& c = constants();
  Problem p;
  p.name = "example1";
  p.system = example_system(dt);
  const auto id = ComparisonFunction::identity();
  const auto delta = cross_gain(dt);
  p.V = IssCertificate{"V",
                       [](const Vec& x) { return std::fabs(x[0]); },
                       id,
                       id,
                       [eps = c.eps_x](const Vec& x) { return eps * rho()(std::fabs(x[0])); },
                       gamma_ell(),
                       Region::sublevel(c.M_ell)};
  p.W = IssCertificate{"W",
                       [](const Vec& z) { return std::fabs(z[0]); },
                       id,
                       id,
                       [eps = c.eps_z](const Vec& z) { return eps * std::fabs(z[0]); },
                       delta,
                       Region::all()};
  p.bundle = RegionalGainBundle{gamma_ell(), c.M_ell, gamma_g(), c.M_g, delta};
  p.dini_V = dini_V_oracle();
  p.dini_W = dini_W_oracle(dt);
  p.tail = TailCertificate{10.0, TailComparator::affine_beats_cube_root};
  p.s_max = 100.0;
  p.grid_n = 4000;
  p.sigma_knots = log_knots(1e-4, 10.0, 96);
  return p;
}

const Artifacts& artifacts() {
  static const Artifacts a = [] {
    auto p = example_problem();
    auto local = build_local_bridge(p);
    auto global = build_global_bridge(p);
    return Artifacts{std::move(p), std::move(local), std::move(global)};
  }();
  return a;
}

std::optional<std::pair<double, double>> check_gamma_optimality(double s_star, double theta) {
  if (!(s_star > 0.0)) return std::nullopt;
  if (!(theta > 0.0) || theta > 1.0) throw DomainError("deflation factor must lie in (0, 1]");
  const double G = gamma_capital()(s_star);
  const double lo = theta * G;
  for (int i = 0; i < 1000; ++i) {
    const double x = lo + (G - lo) * (i / 1000.0);
    if (!(x < G)) break;
    const double dv = abs_dini(x, s_star - rho()(x));
    if (dv > 0.0) return std::make_pair(x, s_star);
  }
  return std::nullopt;
}

}  // namespace rsg::example
