#include <cmath>
#include <sstream>

#include "rsg/detail/formulas.hpp"
#include "rsg/dynamics.hpp"
#include "rsg/errors.hpp"

namespace rsg {

kernels::LoopRhs LoopFamily::rhs() const {
  kernels::LoopRhs r{};
  for (int k = 0; k < 4; ++k) r.drift[k] = drift[k];
  r.q_start = q_start.data();
  r.q_value = q_value.data();
  r.q_slope = q_slope.data();
  r.q_pieces = q_start.size();
  return r;
}

LoopFamily LoopFamily::from(const ComparisonFunction& P, const ComparisonFunction& Q) {
  LoopFamily fam;
  const auto* c = std::get_if<seg::Cubic>(&P.pieces().front().segment);
  if (P.pieces().size() != 1 || c == nullptr) {
    throw DomainError("loop family drift must be a single cubic");
  }
  for (int k = 0; k < 4; ++k) fam.drift[k] = c->c[k];
  for (const auto& p : Q.pieces()) {
    const auto* a = std::get_if<seg::Affine>(&p.segment);
    if (a == nullptr) throw DomainError("loop family feedback must be piecewise affine");
    fam.q_start.push_back(p.start);
    fam.q_value.push_back(a->v0);
    fam.q_slope.push_back(a->slope);
  }
  return fam;
}

void InterconnectedSystem::check_equilibrium() const {
  const Vec x(n, 0.0), z(m, 0.0);
  const Vec fx = f(x, z), gz = g(x, z);
  if (fx.size() != n || gz.size() != m) throw DomainError("field dimension mismatch");
  for (double v : fx) {
    if (!(std::fabs(v) <= 1e-12)) throw DomainError("f(0,0) != 0: origin is not an equilibrium");
  }
  for (double v : gz) {
    if (!(std::fabs(v) <= 1e-12)) throw DomainError("g(0,0) != 0: origin is not an equilibrium");
  }
}

InterconnectedSystem loop_system(const ComparisonFunction& P, const ComparisonFunction& Q) {
  auto fam = std::make_shared<const LoopFamily>(LoopFamily::from(P, Q));
  InterconnectedSystem sys;
  sys.n = sys.m = 1;
  sys.loop = *fam;
  sys.f = [fam](const Vec& x, const Vec& z) {
    return Vec{z[0] - detail::cubic_at(x[0], fam->drift.data())};
  };
  sys.g = [fam](const Vec& x, const Vec& z) {
    const double a = std::fabs(z[0]);
    std::size_t k = 0;
    for (std::size_t j = 1; j < fam->q_start.size(); ++j) k += (a >= fam->q_start[j]) ? 1 : 0;
    const double q = detail::affine_at(a, fam->q_start[k], fam->q_value[k], fam->q_slope[k]);
    return Vec{x[0] - detail::sign_of(z[0]) * q};
  };
  return sys;
}

}  // namespace rsg
