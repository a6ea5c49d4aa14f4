#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rsg/certificates.hpp"
#include "rsg/errors.hpp"
#include "rsg/example.hpp"

namespace rsg {
namespace {

const example::Artifacts& art() { return example::artifacts(); }


TEST(Sampler, DeterministicAndInUnitCube) {
  const auto a = sobol_points(2, 1000, 1);
  const auto b = sobol_points(2, 1000, 1);
  const auto c = sobol_points(2, 1000, 2);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::set<std::pair<double, double>> seen;
  for (const auto& p : a) {
    ASSERT_EQ(p.size(), 2u);
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
    seen.insert({p[0], p[1]});
  }
  EXPECT_EQ(seen.size(), a.size());
}

TEST(Sampler, LowDiscrepancyCoversQuadrants) {
  const auto pts = sobol_points(2, 1024, 9);
  int q[4] = {0, 0, 0, 0};
  for (const auto& p : pts) ++q[(p[0] < 0.5 ? 0 : 1) + (p[1] < 0.5 ? 0 : 2)];
  for (int k : q) EXPECT_EQ(k, 256);
}

TEST(RegionTest, ContainsAndDescribe) {
  EXPECT_TRUE(Region::sublevel(0.236).contains(0.236));
  EXPECT_FALSE(Region::sublevel(0.236).contains(0.237));
  EXPECT_TRUE(Region::superlevel(0.245).contains(0.245));
  EXPECT_TRUE(Region::all().contains(1e9));
  EXPECT_EQ(Region::sublevel(0.236).describe(), "V <= 0.236");
}

TEST(Report, PassedIgnoresInformationalParts) {
  CheckReport r;
  CheckReport info;
  info.violation_count = 3;
  info.informational = true;
  r.parts.push_back(info);
  EXPECT_TRUE(r.passed());
  r.parts.back().informational = false;
  EXPECT_FALSE(r.passed());
  const auto j = to_json(r);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["parts"][0]["violation_count"], 3);
}

TEST(Implication, LocalRegionPassesWithBothDiniSources) {
  const auto& p = art().problem;
  ImplicationOptions num;
  ImplicationOptions ana;
  ana.analytic = p.dini_V;
  const auto a = check_regional_implication(p.system, p.V, p.W, Subsystem::x, p.bundle.local_gain,
                                            Region::sublevel(p.bundle.M_ell), num);
  const auto b = check_regional_implication(p.system, p.V, p.W, Subsystem::x, p.bundle.local_gain,
                                            Region::sublevel(p.bundle.M_ell), ana);
  EXPECT_TRUE(a.passed());
  EXPECT_TRUE(b.passed());
  EXPECT_EQ(a.samples, b.samples);
  ASSERT_TRUE(a.min_margin && b.min_margin);
  EXPECT_NEAR(*a.min_margin, *b.min_margin, 1e-6);
}

TEST(Implication, DeflatedGainProducesWitnesses) {
  const auto& p = art().problem;
  for (double theta : {0.5, 0.9}) {
    const auto r = check_regional_implication(
        p.system, p.V, p.W, Subsystem::x, ComparisonFunction::scaled(theta, example::gamma_ell()),
        Region::sublevel(p.bundle.M_ell));
    EXPECT_FALSE(r.passed()) << theta;
    ASSERT_FALSE(r.violations.empty());
    // Each witness really violates the decay inequality.
    for (const auto& v : r.violations) {
      const Vec x{v.state[0]}, z{v.state[1]};
      const double lhs = p.dini_V(x, z);
      EXPECT_GT(lhs, -p.V.decay(x) + 1e-6);
    }
  }
}

TEST(Implication, ZSubsystemPassesOnWholeBox) {
  const auto& p = art().problem;
  ImplicationOptions o;
  o.analytic = p.dini_W;
  const auto r = check_regional_implication(p.system, p.V, p.W, Subsystem::z, p.bundle.cross_gain,
                                            Region::all(), o);
  EXPECT_TRUE(r.passed());
}

TEST(Implication, EmptyRegionIsReported) {
  const auto& p = art().problem;
  ImplicationOptions o;
  o.sampler.samples = 0;
  EXPECT_THROW(check_regional_implication(p.system, p.V, p.W, Subsystem::x, p.bundle.local_gain,
                                          Region::sublevel(p.bundle.M_ell), o),
               EmptySample);
}

TEST(GlobalSmallGain, TrivialCases) {
  const auto h = ComparisonFunction::affine(0.5);
  EXPECT_TRUE(check_global_small_gain(h, h, 100.0, 1000).passed());
  const auto id = ComparisonFunction::identity();
  const auto r = check_global_small_gain(id, id, 100.0, 1000);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(*r.min_margin, 0.0);
}

TEST(GlobalSmallGain, ExampleFailsWithWitnessOnFootnoteInterval) {
  const auto delta = ComparisonFunction::branch_inverse(example::delta_tilde(), 0.0, kInf);
  const auto r = check_global_small_gain(example::gamma_capital(), delta, 100.0, 4000,
                                         Orientation::delta_after_gamma,
                                         TailCertificate{10.0, TailComparator::affine_beats_cube_root});
  EXPECT_FALSE(r.passed());
  ASSERT_TRUE(r.argmin.has_value());
  EXPECT_GT(*r.argmin, 0.2199);
  EXPECT_LT(*r.argmin, 0.236);
  EXPECT_GT(delta(example::gamma_capital()(*r.argmin)), *r.argmin);
}

TEST(LocalAssumptions, ExamplePasses) {
  const auto r = verify_local_assumptions(art().problem);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.parts.size(), 3u);
  EXPECT_EQ(r.parts[0].id, "A2.limit");
  EXPECT_EQ(r.parts[2].id, "A3.small-gain");
}

TEST(LocalAssumptions, SaturatedGainAtThresholdFails) {
  auto p = example::example_problem();
  p.bundle.local_gain = ComparisonFunction::minimum({example::gamma_ell(), ComparisonFunction::affine(0.0, 0.236)});
  const auto r = verify_local_assumptions(p);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.parts[0].passed());
}

TEST(LocalAssumptions, UsingDeltaTildeInsteadOfInverseFails) {
  auto p = example::example_problem();
  p.bundle.cross_gain = example::delta_tilde();
  const auto r = verify_local_assumptions(p);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.parts[2].passed());
  EXPECT_LT(*r.parts[2].min_margin, 0.0);
}

TEST(GlobalAssumptions, OrientationWitness) {
  const auto& p = art().problem;
  const auto r = verify_global_assumptions(p, Orientation::delta_after_gamma);
  EXPECT_TRUE(r.passed());
  const auto& literal = r.parts.back();
  EXPECT_TRUE(literal.informational);
  EXPECT_FALSE(literal.passed());
  const auto strict = verify_global_assumptions(p, Orientation::gamma_after_delta);
  EXPECT_FALSE(strict.passed());
  // gamma_g(delta(0.49)) lands on the upper branch near Gamma(0.236).
  const double s = 0.49;
  EXPECT_GT(example::gamma_g()(p.bundle.cross_gain(s)), s);
  bool covered = false;
  for (const auto& [a, b] : literal.witness_runs) covered = covered || (a <= s && s <= b);
  EXPECT_TRUE(covered);
}

TEST(Merged, ValuesOnAxesAndOrigin) {
  const auto& U = art().local.U;
  EXPECT_EQ(U({0.0}, {0.0}), 0.0);
  for (double x : {0.01, 0.1, 0.2, -0.15}) EXPECT_EQ(U({x}, {0.0}), U.sigma(std::fabs(x)));
  EXPECT_GT(U.decay_envelope({0.1}, {0.05}), 0.0);
}

TEST(Merged, BranchSwitchAlongDiagonal) {
  const auto& U = art().local.U;
  // sigma_l(s) < s near 0 on this bridge: the max switches where sigma_l(s) = s.
  const double s_star = oracle::bisect([&](double s) { return s - U.sigma(s); }, 0.0, 1e-6, 5.0);
  const double below = 0.99 * s_star, above = 1.01 * s_star;
  EXPECT_EQ(U({below}, {below}), std::max(U.sigma(below), below));
  EXPECT_NEAR(U({s_star}, {s_star}), s_star, 1e-9);
  EXPECT_EQ(U({above}, {above}), std::max(U.sigma(above), above));
}

TEST(LevelConstants, SublevelAlgebra) {
  const auto& a = art();
  EXPECT_NEAR(a.local.U.level_constant, a.local.U.sigma(0.236), 1e-9);
  EXPECT_NEAR(a.global.U.level_constant, a.global.U.sigma(0.245), 1e-9);
  EXPECT_TRUE(containment_holds(a.local.U, a.local.U.level_constant, 0.236, Role::local));
  EXPECT_FALSE(containment_holds(a.local.U, a.local.U.sigma(0.3), 0.236, Role::local));
}

TEST(LevelConstants, IdentityBridgeGivesThreshold) {
  const auto& p = art().problem;
  MergedLyapunov U{ComparisonFunction::identity(), p.V, p.W, Role::local, 0.0};
  EXPECT_NEAR(level_constant(U, 0.3, Role::local), 0.3, 1e-15);
  U.role = Role::global;
  EXPECT_NEAR(level_constant(U, 0.3, Role::global), 0.3, 1e-15);
}

TEST(LevelSets, NestingProperty) {
  const auto& U = art().global.U;
  auto fn = [&](const Vec& x, const Vec& z) { return U(x, z); };
  for (double c1 : {0.05, 0.1, 0.2}) {
    for (double c2 : {c1 * 1.01, c1 * 2.0}) {
      for (const auto& [x, z] : level_boundary(fn, 1, 1, c1, 360)) {
        ASSERT_LE(U(x, z), c2 * (1.0 + 1e-12));
      }
    }
  }
}

TEST(LevelSets, BoundaryPointsSitOnTheLevel) {
  const auto& U = art().local.U;
  auto fn = [&](const Vec& x, const Vec& z) { return U(x, z); };
  for (const auto& [x, z] : level_boundary(fn, 1, 1, 0.1, 90)) EXPECT_NEAR(U(x, z), 0.1, 1e-9);
}

TEST(LevelSets, DominanceTransfersThroughMax) {
  const auto& a = art();
  const auto gh = ComparisonFunction::minimum({a.global.gamma_tilde.fn, a.local.sigma.sigma});
  const auto sh = build_smooth_bridge(a.problem.bundle.cross_gain, gh, a.problem.sigma_knots);
  const auto grid = make_grid(Interval::closed(1e-4, 1.0), 2000, GridKind::geometric);
  bool below = true;
  for (double s : grid) below = below && sh.sigma(s) < a.local.sigma.sigma(s);
  ASSERT_TRUE(below);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec x{u(rng)}, z{u(rng)};
    const double uh = std::max(sh.sigma(std::fabs(x[0])), std::fabs(z[0]));
    const double ul = a.local.U(x, z);
    EXPECT_LE(uh, ul);
    if (std::fabs(z[0]) < sh.sigma(std::fabs(x[0]))) {
      EXPECT_LT(uh, ul);
    }
  }
}

TEST(Theorem2, ExampleNeedsThresholdSwap) {
  const auto& p = art().problem;
  const auto plain = verify_theorem2(p);
  EXPECT_FALSE(plain.report.passed());
  EXPECT_EQ(plain.report.parts.front().id, "A6.thresholds");
  Theorem2Options o;
  o.threshold_swap = true;
  const auto swapped = verify_theorem2(p, o);
  EXPECT_TRUE(swapped.report.passed());
  EXPECT_NEAR(swapped.M, 0.2405, 1e-15);
  bool noted = false;
  for (const auto& n : swapped.report.parts.front().notes) noted = noted || n.find("configuration note") == 0;
  EXPECT_TRUE(noted);
}

TEST(Theorem2, OrderedThresholdsPassWithoutSwap) {
  auto p = example::example_problem();
  p.bundle.M_ell = 0.3;
  p.V.region = Region::sublevel(0.3);
  const auto r = verify_theorem2(p);
  EXPECT_TRUE(r.report.passed());
  EXPECT_NEAR(r.M, 0.2725, 1e-15);
  EXPECT_LT(r.M_hat_g, r.M_hat_ell);
}

TEST(Theorem2, DegenerateSigmaHatEqualToSigmaEll) {
  const auto& a = art();
  const auto& s = a.local.sigma.sigma;
  const auto r = check_inclusion_chain(s, s, a.problem.V, a.problem.W, 0.2, 0.22, 0.236, 360);
  EXPECT_TRUE(r.passed());
  bool boundary = false;
  for (const auto& part : r.parts) {
    for (const auto& n : part.notes) boundary = boundary || n.find("boundary case") != std::string::npos;
  }
  EXPECT_TRUE(boundary);
}

}  // namespace
}  // namespace rsg
