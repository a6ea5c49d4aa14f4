#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rsg/algebra.hpp"
#include "rsg/bridges.hpp"
#include "rsg/comparison_function.hpp"
#include "rsg/dynamics.hpp"
#include "rsg/gain_json.hpp"

namespace rsg {

enum class RegionKind { all, sublevel, superlevel };

// Region of the x-subsystem storage: {V <= M}, {V >= M} or everything.
struct Region {
  RegionKind kind = RegionKind::all;
  double M = 0.0;

  static Region all() { return {}; }
  static Region sublevel(double m) { return {RegionKind::sublevel, m}; }
  static Region superlevel(double m) { return {RegionKind::superlevel, m}; }
  bool contains(double v) const;
  std::string describe() const;
};

using StorageFn = std::function<double(const Vec&)>;

struct IssCertificate {
  std::string name;
  StorageFn storage;
  ComparisonFunction lower = ComparisonFunction::identity();  // lower(|y|) <= storage(y)
  ComparisonFunction upper = ComparisonFunction::identity();  // storage(y) <= upper(|y|)
  StorageFn decay;  // lambda, positive definite
  Gain gain = ComparisonFunction::identity();
  Region region;
};

struct RegionalGainBundle {
  Gain local_gain = ComparisonFunction::identity();
  double M_ell = 0.0;
  Gain global_gain = ComparisonFunction::identity();
  double M_g = 0.0;
  Gain cross_gain = ComparisonFunction::identity();  // delta of the z-subsystem

  double b_ell() const { return local_gain.limit_at_infinity(); }
  double b_g() const { return global_gain.limit_at_infinity(); }
};

struct Violation {
  Vec state;  // x followed by z, or the scalar argument for gain checks
  double margin = 0.0;
};

struct CheckReport {
  std::string id;
  std::string region;
  std::vector<Violation> violations;  // first few, in sampling order
  std::size_t violation_count = 0;
  std::size_t samples = 0;
  std::optional<double> min_margin;
  std::optional<double> argmin;
  std::vector<std::pair<double, double>> witness_runs;
  std::vector<std::string> notes;
  std::vector<CheckReport> parts;
  bool informational = false;  // reported but excluded from passed()

  bool passed() const;
};

Json to_json(const CheckReport& r);
void print_table(std::ostream& os, const CheckReport& r, int depth = 0);

struct SamplerOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  double z_box = 10.0;             // half-width in every z direction
  double superlevel_cap = 1000.0;  // superlevel regions are cut at V <= cap
};

// Scrambled Sobol points in [0,1)^dim: boost's Sobol sequence with a digital
// shift drawn from mt19937_64(seed).
std::vector<Vec> sobol_points(std::size_t dim, std::size_t count, std::uint64_t seed);

enum class Subsystem { x, z };
using DiniOracle = std::function<double(const Vec& x, const Vec& z)>;

struct ImplicationOptions {
  SamplerOptions sampler;
  double tol_dini = 1e-6;
  DiniOracle analytic;  // numerical estimator when empty
  std::size_t keep = 20;
};

// Samples the region and checks
//   x: V >= gain(W)      => D+_f V <= -lambda_x + tol
//   z: W >= gain(V)      => D+_g W <= -lambda_z + tol
// z directions whose W provably violates the antecedent inside the region
// are excluded from the box, since the implication is vacuous there.
CheckReport check_regional_implication(const InterconnectedSystem& sys, const IssCertificate& V,
                                       const IssCertificate& W, Subsystem which, const Gain& gain,
                                       const Region& region, const ImplicationOptions& opts = {});

struct Problem {
  std::string name;
  InterconnectedSystem system;
  IssCertificate V;
  IssCertificate W;
  RegionalGainBundle bundle;
  DiniOracle dini_V;
  DiniOracle dini_W;
  std::optional<TailCertificate> tail;
  double s_max = 100.0;
  std::size_t grid_n = 4000;
  std::vector<double> sigma_knots;  // smooth bridge knots; log grid when empty
  ImplicationOptions implication;
  bool analytic_dini = false;  // use dini_V / dini_W instead of the estimator
};

CheckReport check_global_small_gain(const Gain& gamma, const Gain& delta, double s_max,
                                    std::size_t grid_n,
                                    Orientation o = Orientation::delta_after_gamma,
                                    std::optional<TailCertificate> tail = std::nullopt);

CheckReport verify_assumption1(const Problem& p);
CheckReport verify_local_assumptions(const Problem& p);
// `required` is the orientation that decides pass/fail; the other one is
// reported as informational.
CheckReport verify_global_assumptions(const Problem& p, Orientation required);

enum class Role { local, global };
const char* to_string(Role r);

struct MergedLyapunov {
  ComparisonFunction sigma;
  IssCertificate V;
  IssCertificate W;
  Role role = Role::local;
  double level_constant = 0.0;

  double operator()(const Vec& x, const Vec& z) const;
  // min{sigma'(V(x)) lambda_x(x), lambda_z(z)}
  double decay_envelope(const Vec& x, const Vec& z) const;
};

struct BridgeSpec {
  Gain lower;  // delta
  Gain upper;  // gamma~ from the Lemma-6 bridge
  std::vector<double> knots;
};

MergedLyapunov build_merged_lyapunov(const BridgeSpec& spec, const IssCertificate& V,
                                     const IssCertificate& W, Role role,
                                     SmoothBridge* bridge_out = nullptr);

// Boundary points of {U <= c} along `rays` directions of the (x[0], z[0])
// plane, located by bisection on the radius.
std::vector<std::pair<Vec, Vec>> level_boundary(const std::function<double(const Vec&, const Vec&)>& U,
                                                std::size_t n, std::size_t m, double c,
                                                std::size_t rays = 720);

// local: every boundary point of {U <= c} has V <= M.
// global: {V <= M} x {0} lies in {U <= c}.
bool containment_holds(const MergedLyapunov& U, double c, double M, Role role);

// sigma(M), confirmed by containment_holds; ContainmentFailed otherwise.
double level_constant(const MergedLyapunov& U, double M, Role role);

struct LocalBridge {
  KinfBridge gamma_tilde;
  SmoothBridge sigma;
  MergedLyapunov U;
};

struct GlobalBridge {
  double p_eff = 0.0;  // start of the Lemma-6 interval after the literal check
  KinfBridge gamma_tilde;
  SmoothBridge sigma;
  MergedLyapunov U;
};

LocalBridge build_local_bridge(const Problem& p);
// Lemma 6 needs gamma_g(delta(s)) < s on [p, q]; p is pushed past the last
// literal-orientation violation on [M_g, s_max] by a factor 1.01.
GlobalBridge build_global_bridge(const Problem& p);

struct Theorem2Options {
  bool threshold_swap = false;  // use (min, max) of the thresholds
  std::size_t rays = 720;
};

struct Theorem2Result {
  CheckReport report;
  double M = 0.0;
  double M_g = 0.0;
  double M_ell = 0.0;
  double M_hat_g = 0.0;
  double M_hat_ell = 0.0;
};

// Inclusion chain of the proof with levels read in V units:
//   {U^_g <= s^_g(M_g)} c {U^_g <= s^_g(M)} c {U_l <= s_l(M)} c {U_l <= s_l(M_l)}.
CheckReport check_inclusion_chain(const ComparisonFunction& sigma_hat_g,
                                  const ComparisonFunction& sigma_ell, const IssCertificate& V,
                                  const IssCertificate& W, double M_g, double M, double M_ell,
                                  std::size_t rays = 720);

Theorem2Result verify_theorem2(const Problem& p, const Theorem2Options& opts = {});

}  // namespace rsg
