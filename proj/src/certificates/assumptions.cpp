#include <sstream>

#include "rsg/certificates.hpp"
#include "rsg/errors.hpp"

namespace rsg {
namespace {

CheckReport from_margin(std::string id, const MarginReport& m) {
  CheckReport r;
  r.id = std::move(id);
  std::ostringstream iv;
  iv << (m.interval.lo_open ? "(" : "[") << format_number(m.interval.lo) << ", "
     << format_number(m.interval.hi) << (m.interval.hi_open || !m.interval.bounded() ? ")" : "]");
  r.region = iv.str();
  r.samples = m.grid_size;
  r.min_margin = m.min_margin;
  r.argmin = m.argmin;
  r.violation_count = m.violation_count;
  if (!m.passed) r.violations.push_back({{m.argmin}, m.min_margin});
  r.witness_runs = m.violation_runs;
  if (m.tail) r.notes.push_back("tail: " + m.tail->detail);
  return r;
}

CheckReport limit_check(std::string id, double M, double b) {
  CheckReport r;
  r.id = std::move(id);
  r.region = "M < lim gain";
  r.min_margin = b - M;
  if (!(M < b)) {
    r.violation_count = 1;
    r.violations.push_back({{M}, b - M});
  }
  r.notes.push_back("M = " + format_number(M) + ", limit = " + format_number(b));
  return r;
}

// Small-gain margin on [from, inf) with a tail certificate; an undecided
// tail becomes a failed report rather than an exception.
CheckReport unbounded_margin(std::string id, const Gain& gamma, const Gain& delta, double from,
                             Orientation o, const Problem& p) {
  SmallGainOptions sg{p.s_max, GridKind::geometric, p.tail};
  const Interval iv{from, kInf, false, true};
  try {
    auto r = from_margin(std::move(id), small_gain_margin(gamma, delta, iv, o, p.grid_n, sg));
    r.notes.push_back(std::string("orientation ") + to_string(o));
    return r;
  } catch (const AsymptoticUndecided& e) {
    // The sampled part still tells whether the failure is certain.
    SmallGainOptions bounded{p.s_max, GridKind::geometric, std::nullopt};
    auto r = from_margin(std::move(id), small_gain_margin(gamma, delta,
                                                          Interval::closed(from, p.s_max), o,
                                                          p.grid_n, bounded));
    r.notes.push_back(std::string("orientation ") + to_string(o));
    r.notes.push_back(std::string("asymptotic part undecided: ") + e.what());
    if (r.violation_count == 0) r.violation_count = 1;
    return r;
  }
}

ImplicationOptions implication_options(const Problem& p, const DiniOracle& oracle) {
  auto o = p.implication;
  if (!o.analytic && p.analytic_dini) o.analytic = oracle;
  return o;
}

}  // namespace

CheckReport check_global_small_gain(const Gain& gamma, const Gain& delta, double s_max,
                                    std::size_t grid_n, Orientation o,
                                    std::optional<TailCertificate> tail) {
  SmallGainOptions opts{s_max, GridKind::geometric, std::nullopt};
  auto r = from_margin("theorem1",
                       small_gain_margin(gamma, delta, Interval::left_open(0.0, s_max), o, grid_n,
                                         opts));
  r.region = "(0, inf)";
  r.notes.push_back(std::string("orientation ") + to_string(o));
  if (r.violation_count > 0) return r;
  std::vector<TailCertificate> tries;
  if (tail) {
    tries.push_back(*tail);
  } else {
    tries = {{s_max, TailComparator::affine_beats_affine},
             {s_max, TailComparator::affine_beats_cube_root}};
  }
  std::string why;
  for (const auto& t : tries) {
    const auto proof = prove_tail(gamma, delta, o, t);
    if (proof.holds) {
      r.notes.push_back("tail: " + proof.detail);
      return r;
    }
    why += (why.empty() ? "" : "; ") + proof.detail;
  }
  throw AsymptoticUndecided("no tail certificate holds beyond s_max: " + why);
}

CheckReport verify_assumption1(const Problem& p) {
  CheckReport r;
  r.id = "assumption1";
  auto imp = check_regional_implication(p.system, p.V, p.W, Subsystem::z, p.bundle.cross_gain,
                                        Region::all(), implication_options(p, p.dini_W));
  imp.id = "A1.implication";
  r.parts.push_back(std::move(imp));
  return r;
}

CheckReport verify_local_assumptions(const Problem& p) {
  const auto& b = p.bundle;
  CheckReport r;
  r.id = "local";
  r.parts.push_back(limit_check("A2.limit", b.M_ell, b.b_ell()));
  auto imp = check_regional_implication(p.system, p.V, p.W, Subsystem::x, b.local_gain,
                                        Region::sublevel(b.M_ell), implication_options(p, p.dini_V));
  imp.id = "A2.implication";
  r.parts.push_back(std::move(imp));
  auto sg = from_margin("A3.small-gain",
                        small_gain_margin(b.local_gain, b.cross_gain,
                                          Interval::left_open(0.0, b.M_ell),
                                          Orientation::gamma_after_delta, p.grid_n));
  sg.notes.push_back(std::string("orientation ") + to_string(Orientation::gamma_after_delta));
  r.parts.push_back(std::move(sg));
  return r;
}

CheckReport verify_global_assumptions(const Problem& p, Orientation required) {
  const auto& b = p.bundle;
  CheckReport r;
  r.id = "global";
  r.parts.push_back(limit_check("A4.limit", b.M_g, b.b_g()));
  auto imp = check_regional_implication(p.system, p.V, p.W, Subsystem::x, b.global_gain,
                                        Region::superlevel(b.M_g), implication_options(p, p.dini_V));
  imp.id = "A4.implication";
  r.parts.push_back(std::move(imp));
  const Orientation other = required == Orientation::gamma_after_delta
                                ? Orientation::delta_after_gamma
                                : Orientation::gamma_after_delta;
  r.parts.push_back(unbounded_margin(std::string("A5.") + to_string(required), b.global_gain,
                                     b.cross_gain, b.M_g, required, p));
  auto info = unbounded_margin(std::string("A5.") + to_string(other), b.global_gain, b.cross_gain,
                               b.M_g, other, p);
  info.informational = true;
  r.parts.push_back(std::move(info));
  return r;
}

}  // namespace rsg
