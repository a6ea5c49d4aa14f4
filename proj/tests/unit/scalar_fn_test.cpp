#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "rsg/algebra.hpp"
#include "rsg/errors.hpp"
#include "rsg/example.hpp"
#include "rsg/gain_json.hpp"

namespace rsg {
namespace {

const ComparisonFunction& rho() { return example::rho(); }

ComparisonFunction delta_tilde_inverse() {
  return ComparisonFunction::branch_inverse(example::delta_tilde(), 0.0, kInf);
}

TEST(Eval, RhoAtAnchors) {
  EXPECT_EQ(rho()(0.0), 0.0);
  EXPECT_NEAR(rho()(0.5), 0.25, 1e-12);
  EXPECT_NEAR(rho()(5.0 / 6.0), 25.0 / 108.0, 1e-12);
}

TEST(Eval, NegativeArgumentIsDomainError) {
  EXPECT_THROW(rho()(-1e-3), DomainError);
  EXPECT_THROW(ComparisonFunction::identity()(std::nan("")), DomainError);
}

TEST(Eval, FactorizationOracleMatchesCubic) {
  for (double x : make_grid(Interval::closed(0.0, 3.0), 301)) {
    EXPECT_NEAR(rho()(x) - 25.0 / 108.0, oracle::rho_shift_factored(x), 1e-13) << x;
  }
}

TEST(Invert, ZeroMapsToZero) { EXPECT_NEAR(invert(rho(), 0.0, 0.0, 0.5), 0.0, 1e-10); }

TEST(Invert, SimpleRootOfShiftedCubic) {
  // Simple root 1/3 with rho'(1/3) = 1/4: residual 1e-10 bounds the error by 4e-10.
  EXPECT_NEAR(invert(rho(), 25.0 / 108.0, 0.0, 0.5), 1.0 / 3.0, 5e-10);
}

TEST(Invert, DoubleRootOfShiftedCubic) {
  // Double root at 5/6 with rho''(5/6) = 1: error is at most sqrt(2e-10).
  const double s = invert(rho(), 25.0 / 108.0, 5.0 / 6.0, 10.0);
  EXPECT_NEAR(s, 5.0 / 6.0, 2e-5);
  EXPECT_LE(std::fabs(rho()(s) - 25.0 / 108.0), 1e-10);
}

TEST(Invert, OutsideBracketIsBracketError) {
  EXPECT_THROW(invert(rho(), 0.3, 0.0, 0.5), BracketError);
}

TEST(Invert, RoundTripOnRandomFunctions) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<ComparisonFunction> fs{
        ComparisonFunction::affine(u(rng)),
        ComparisonFunction::cubic({0.0, u(rng), 0.0, u(rng)}),
    };
    std::vector<double> x{0.0}, y{0.0};
    for (int k = 0; k < 5; ++k) {
      x.push_back(x.back() + u(rng));
      y.push_back(y.back() + u(rng));
    }
    fs.push_back(ComparisonFunction::piecewise_linear(x, y, u(rng)));
    fs.push_back(ComparisonFunction::hermite(x, y, monotone_slopes(x, y)));
    for (const auto& f : fs) {
      const double hi = 8.0;
      const double target = f(hi) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double s = invert(f, target, 0.0, hi);
      EXPECT_LE(std::fabs(f(s) - target), 1e-9);
    }
  }
}

TEST(Compose, IdentityLaw) {
  const auto& f = example::gamma_ell();
  const auto c = ComparisonFunction::compose(ComparisonFunction::identity(), f);
  for (double s : make_grid(Interval::closed(0.0, 1.0), 100)) EXPECT_EQ(c(s), f(s));
}

TEST(Compose, AffineAlgebra) {
  const auto c = ComparisonFunction::compose(ComparisonFunction::affine(0.5),
                                             ComparisonFunction::affine(1.0 / 3.0));
  EXPECT_NEAR(c(1.0), 1.0 / 6.0, 1e-15);
}

TEST(Compose, GammaEllAfterDeltaInverseMatchesNestedBisection) {
  const auto c = ComparisonFunction::compose(example::gamma_ell(), delta_tilde_inverse());
  const auto knots = example::default_delta_knots();
  const double inner = oracle::inverse([&](double s) { return oracle::interp(knots, 1.0, s); }, 0.2);
  const double expected = oracle::gamma_ell_formula(inner);
  EXPECT_NEAR(c(0.2), expected, 1e-9);
}

TEST(Compose, MonotoneCompositionProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  const auto grid = make_grid(Interval::left_open(0.0, 5.0), 500);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = ComparisonFunction::cubic({0.0, u(rng), 0.0, u(rng)});
    std::vector<double> x{0.0}, y{0.0};
    for (int k = 0; k < 4; ++k) {
      x.push_back(x.back() + u(rng));
      y.push_back(y.back() + u(rng));
    }
    const auto b = ComparisonFunction::piecewise_linear(x, y, u(rng));
    EXPECT_TRUE(check_class_k(ComparisonFunction::compose(a, b), grid).ok);
    EXPECT_TRUE(check_class_k(ComparisonFunction::compose(b, a), grid).ok);
  }
}

TEST(ClassK, DetectsNonMonotoneCubic) {
  const auto grid = make_grid(Interval::closed(0.0, 2.0), 400);
  const auto r = check_class_k(rho(), grid);
  EXPECT_FALSE(r.ok);
  EXPECT_GT(r.where, 0.5);
  EXPECT_LT(r.where, 5.0 / 6.0);
}

TEST(ClassK, ExampleGainsAreContinuousAcrossSeams) {
  EXPECT_LE(example::gamma_ell().max_seam_gap(), 1e-9);
  EXPECT_LE(example::gamma_g().max_seam_gap(), 1e-9);
  EXPECT_LE(example::delta_tilde().max_seam_gap(), 1e-9);
}

TEST(PiecewiseGainTest, GammaJumpLimits) {
  const auto& G = example::gamma_capital();
  const double s1 = example::constants().s1;
  ASSERT_EQ(G.jumps().size(), 1u);
  EXPECT_NEAR(G.jumps()[0].location, s1, 0.0);
  EXPECT_NEAR(G.left_limit(s1), 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(G(s1), 5.0 / 6.0, 1e-8);
  EXPECT_LT(G.jumps()[0].left, G.jumps()[0].right);
  EXPECT_EQ(G(0.0), 0.0);
}

TEST(PiecewiseGainTest, RejectsDownwardJump) {
  std::vector<GainBranch> b{{0.0, ComparisonFunction::affine(2.0)},
                            {1.0, ComparisonFunction::affine(1.0)}};
  EXPECT_THROW(PiecewiseGain{b}, DomainError);
}

TEST(Grid, OpenEndsAreExcluded) {
  const auto g = make_grid(Interval::open(0.0, 1.0), 10);
  EXPECT_GT(g.front(), 0.0);
  EXPECT_LT(g.back(), 1.0);
  const auto c = make_grid(Interval::closed(0.1, 100.0), 50, GridKind::geometric);
  EXPECT_EQ(c.front(), 0.1);
  EXPECT_EQ(c.back(), 100.0);
}

TEST(Sandwich, AffineMarginsAtLeftEndpoint) {
  const auto r = sandwich_margin(ComparisonFunction::affine(1.0 / 3.0), ComparisonFunction::affine(0.5),
                                 ComparisonFunction::identity(), Interval::closed(0.1, 1.0), 64);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.min_margin, 0.1 / 6.0, 1e-15);
  EXPECT_NEAR(r.argmin, 0.1, 1e-15);
}

TEST(Sandwich, OrderingViolated) {
  const auto r = sandwich_margin(ComparisonFunction::identity(), ComparisonFunction::affine(0.5),
                                 ComparisonFunction::affine(2.0), Interval::closed(0.1, 1.0), 64);
  EXPECT_FALSE(r.passed);
  EXPECT_LT(r.min_margin, 0.0);
}

TEST(Sandwich, EmptyIntervalIsDomainError) {
  const auto id = ComparisonFunction::identity();
  EXPECT_THROW(sandwich_margin(id, id, id, Interval::closed(1.0, 1.0), 64), DomainError);
}

TEST(SmallGain, HalfGainsPass) {
  const auto h = ComparisonFunction::affine(0.5);
  const auto r = small_gain_margin(h, h, Interval::left_open(0.0, 1.0),
                                   Orientation::gamma_after_delta, 100);
  const double s_min = make_grid(Interval::left_open(0.0, 1.0), 100).front();
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.min_margin, 0.75 * s_min, 1e-15);
}

TEST(SmallGain, GlobalConditionFailsOnFootnoteInterval) {
  const auto r = small_gain_margin(example::gamma_capital(), delta_tilde_inverse(),
                                   Interval::open(0.2199, 0.236), Orientation::delta_after_gamma, 2000);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.argmin, 0.2199);
  EXPECT_LT(r.argmin, 0.236);
}

TEST(SmallGain, LocalConditionPasses) {
  const auto r = small_gain_margin(example::gamma_ell(), delta_tilde_inverse(),
                                   Interval::left_open(0.0, 0.236), Orientation::gamma_after_delta, 4000);
  EXPECT_TRUE(r.passed);
  // Nested-bisection oracle at the reported argmin.
  const auto knots = example::default_delta_knots();
  const double inner =
      oracle::inverse([&](double s) { return oracle::interp(knots, 1.0, s); }, r.argmin);
  EXPECT_NEAR(r.min_margin, r.argmin - oracle::gamma_ell_formula(inner), 1e-9);
}

TEST(SmallGain, UnboundedWithoutTailIsUndecided) {
  const auto h = ComparisonFunction::affine(0.5);
  EXPECT_THROW(small_gain_margin(h, h, Interval::closed(1.0, kInf), Orientation::gamma_after_delta, 100),
               AsymptoticUndecided);
}

TEST(SmallGain, UnboundedWithAffineTailPassesBothOrientations) {
  const auto h = ComparisonFunction::affine(0.5);
  SmallGainOptions o;
  o.tail = TailCertificate{10.0, TailComparator::affine_beats_affine};
  for (auto orient : {Orientation::gamma_after_delta, Orientation::delta_after_gamma}) {
    const auto r = small_gain_margin(h, h, Interval::closed(1.0, kInf), orient, 200, o);
    EXPECT_TRUE(r.passed);
    ASSERT_TRUE(r.tail.has_value());
    EXPECT_TRUE(r.tail->holds);
  }
}

TEST(SmallGain, ExampleCubeRootTailCertificate) {
  const auto p = prove_tail(example::gamma_capital(), example::cross_gain(example::delta_tilde()),
                            Orientation::delta_after_gamma,
                            {10.0, TailComparator::affine_beats_cube_root});
  EXPECT_TRUE(p.holds) << p.detail;
  const auto wrong = prove_tail(example::gamma_capital(), example::cross_gain(example::delta_tilde()),
                                Orientation::delta_after_gamma,
                                {10.0, TailComparator::affine_beats_affine});
  EXPECT_FALSE(wrong.holds);
}

TEST(GapMargin, ReportsViolationRuns) {
  const auto r = gap_margin(ComparisonFunction::affine(1.0), ComparisonFunction::cubic({0.0, 0.0, 1.0, 0.0}),
                            Interval::closed(0.0, 2.0), 201);
  EXPECT_FALSE(r.passed);
  ASSERT_FALSE(r.violation_runs.empty());
  EXPECT_NEAR(r.violation_runs.back().first, 1.0, 1e-12);
  EXPECT_NEAR(r.violation_runs.back().second, 2.0, 1e-12);
}

TEST(Json, RoundTripIsBitStableForExampleGains) {
  const std::vector<Gain> gains{example::gamma_capital(), example::gamma_ell(), example::gamma_g(),
                                example::delta_tilde(), example::cross_gain(example::delta_tilde()),
                                rho()};
  const auto grid = make_grid(Interval::closed(0.0, 3.0), 500);
  for (const auto& g : gains) {
    const std::string text = gain_to_json(g).dump();
    const Gain back = gain_from_json(Json::parse(text));
    EXPECT_EQ(gain_to_json(back).dump(), text);
    for (double s : grid) {
      const double a = g(s), b = back(s);
      EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0) << s;
    }
  }
}

TEST(Json, DecimalStringsAndInfinity) {
  const auto f = function_from_json(
      Json::parse(R"({"kind":"branch-inverse","lo":"0","hi":"inf","scale":"1",
                      "of":{"kind":"affine","slope":"0.25","intercept":"0"}})"));
  EXPECT_NEAR(f(1.0), 4.0, 1e-9);
  EXPECT_EQ(f.limit_at_infinity(), kInf);
  EXPECT_EQ(number_from_json(Json("0.1")), 0.1);
  EXPECT_EQ(number_to_json(kInf), Json("inf"));
}

TEST(Json, RejectsUnknownKeysAndBadNumbers) {
  EXPECT_THROW(function_from_json(Json::parse(R"({"kind":"affine","slope":1,"intercept":0,"extra":1})")),
               ConfigError);
  EXPECT_THROW(function_from_json(Json::parse(R"({"kind":"nope"})")), ConfigError);
  EXPECT_THROW(number_from_json(Json("0.1x")), ConfigError);
  EXPECT_THROW(number_from_json(Json::array()), ConfigError);
}

}  // namespace
}  // namespace rsg
