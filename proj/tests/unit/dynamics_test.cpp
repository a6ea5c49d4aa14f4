#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rsg/dynamics.hpp"
#include "rsg/errors.hpp"
#include "rsg/example.hpp"

namespace rsg {
namespace {

InterconnectedSystem make_system(Field f, Field g) {
  InterconnectedSystem s;
  s.f = std::move(f);
  s.g = std::move(g);
  return s;
}

TEST(Dini, AbsAlongExampleField) {
  auto phi = [](const Vec& y) { return std::fabs(y[0]); };
  auto dir = [](const Vec& y) { return Vec{-oracle::rho(y[0]) + y[1]}; };
  const auto e = dini_forward(phi, dir, {1.0, 0.0});
  EXPECT_NEAR(e.value, -0.25, 1e-4);
  EXPECT_LT(e.spread, 1e-4);
}

TEST(Dini, SmoothStationaryPoint) {
  const auto e = dini_forward([](const Vec& y) { return y[0] * y[0]; },
                              [](const Vec&) { return Vec{1.0}; }, {0.0});
  EXPECT_NEAR(e.value, 0.0, 1e-6);
}

TEST(Dini, KinkOfAbsoluteValue) {
  auto abs0 = [](const Vec& y) { return std::fabs(y[0]); };
  EXPECT_NEAR(dini_forward(abs0, [](const Vec&) { return Vec{1.0}; }, {0.0}).value, 1.0, 1e-6);
  EXPECT_NEAR(dini_forward(abs0, [](const Vec&) { return Vec{-2.5}; }, {0.0}).value, 2.5, 1e-6);
}

TEST(Dini, NonFiniteIsReported) {
  EXPECT_THROW(dini_forward([](const Vec& y) { return std::log(y[0]); },
                            [](const Vec&) { return Vec{1.0}; }, {0.0}),
               NonFinite);
}

TEST(Dini, DefaultScheduleIsDecreasing) {
  const auto t = default_tau_schedule();
  ASSERT_EQ(t.size(), 21u);
  EXPECT_EQ(t.front(), 1e-2);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_EQ(t[k], 0.5 * t[k - 1]);
}

// Random cubic polynomials in two variables along random quadratic fields.
TEST(Dini, MatchesAnalyticDerivativeOnSmoothSuite) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    double c[10], a[6], b[6];
    for (auto& v : c) v = u(rng);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    auto phi = [&](const Vec& y) {
      const double x = y[0], z = y[1];
      return c[0] + c[1] * x + c[2] * z + c[3] * x * x + c[4] * x * z + c[5] * z * z +
             c[6] * x * x * x + c[7] * x * x * z + c[8] * x * z * z + c[9] * z * z * z;
    };
    auto quad = [](const double* k, double x, double z) {
      return k[0] + k[1] * x + k[2] * z + k[3] * x * x + k[4] * x * z + k[5] * z * z;
    };
    auto dir = [&](const Vec& y) { return Vec{quad(a, y[0], y[1]), quad(b, y[0], y[1])}; };
    const Vec y{2.0 * u(rng), 2.0 * u(rng)};
    const double x = y[0], z = y[1];
    const double px = c[1] + 2 * c[3] * x + c[4] * z + 3 * c[6] * x * x + 2 * c[7] * x * z + c[8] * z * z;
    const double pz = c[2] + c[4] * x + 2 * c[5] * z + c[7] * x * x + 2 * c[8] * x * z + 3 * c[9] * z * z;
    const auto d = dir(y);
    EXPECT_NEAR(dini_forward(phi, dir, y).value, px * d[0] + pz * d[1], 1e-4) << trial;
  }
}

TEST(Integrate, EquilibriumStaysAtZero) {
  const auto sys = example::example_system(example::delta_tilde());
  const auto tr = integrate(sys, {0.0}, {0.0}, 1e-3, 1.0, {100, {}});
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(tr.x[i][0], 0.0);
    EXPECT_EQ(tr.z[i][0], 0.0);
  }
}

TEST(Integrate, FourthOrderOnLinearSystem) {
  const auto sys = make_system([](const Vec& x, const Vec& z) { return Vec{-x[0] + z[0]}; },
                               [](const Vec&, const Vec& z) { return Vec{-2.0 * z[0]}; });
  auto err = [&](double h) {
    const auto tr = integrate(sys, {1.0}, {1.0}, h, 1.0);
    const double exact = 2.0 * std::exp(-1.0) - std::exp(-2.0);
    return std::fabs(tr.x.back()[0] - exact);
  };
  const double e1 = err(0.1), e2 = err(0.05);
  EXPECT_LT(e1, 1e-5);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.2);
}

TEST(Integrate, ExampleFromSmallState) {
  const auto sys = example::example_system(example::delta_tilde());
  const auto tr = integrate(sys, {0.1}, {0.1}, 1e-3, 50.0, {1000, {}});
  EXPECT_LT(tr.norm(tr.size() - 1), 1e-3);
}

TEST(Integrate, BlowupIsThrown) {
  const auto sys = make_system([](const Vec& x, const Vec&) { return Vec{x[0] * x[0]}; },
                               [](const Vec&, const Vec&) { return Vec{0.0}; });
  EXPECT_THROW(integrate(sys, {2.0}, {0.0}, 1e-3, 1.0), Blowup);
}

TEST(Integrate, StepCountValidation) {
  EXPECT_EQ(step_count(1e-3, 200.0), 200000u);
  EXPECT_THROW(step_count(1e-3, 0.0015), DomainError);
  EXPECT_THROW(step_count(0.0, 1.0), DomainError);
  EXPECT_THROW(step_count(1.0, 0.5), DomainError);
}

TEST(Integrate, TrajectoryInvariants) {
  const auto sys = example::example_system(example::delta_tilde());
  IntegrateOptions o;
  o.record_every = 7;  // final step is recorded even off the stride
  o.channels = {{"V", [](const Vec& x, const Vec&) { return std::fabs(x[0]); }}};
  const auto tr = integrate(sys, {0.2}, {-0.1}, 1e-2, 1.0, o);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
  EXPECT_NEAR(tr.times.back(), 1.0, 1e-12);
  EXPECT_EQ(tr.channel("V").size(), tr.size());
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,x,z,V");
}

TEST(Integrate, WChannelSatisfiesAssumptionOneSampleWise) {
  const auto p = example::example_problem();
  const auto tr = integrate(p.system, {0.0}, {5.0}, 1e-3, 50.0, {100, {}});
  const auto dW = example::dini_W_oracle(example::delta_tilde());
  const double eps_z = example::constants().eps_z;
  std::size_t active = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double V = std::fabs(tr.x[i][0]), W = std::fabs(tr.z[i][0]);
    if (W > 0.0 && W >= p.bundle.cross_gain(V)) {
      ++active;
      EXPECT_LE(dW(tr.x[i], tr.z[i]), -eps_z * W + 1e-6) << tr.times[i];
    }
  }
  EXPECT_GT(active, 0u);
}

TEST(Monitor, ZeroTrajectoryPasses) {
  Trajectory tr;
  tr.times = {0.0, 1.0, 2.0};
  tr.x = tr.z = {{0.0}, {0.0}, {0.0}};
  tr.channel_names = {"U"};
  tr.channels = {{0.0, 0.0, 0.0}};
  const auto r = monitor_lyapunov(tr, "U");
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_increment, 0.0);
}

TEST(Monitor, GrowthIsDetected) {
  const auto sys = make_system([](const Vec& x, const Vec&) { return Vec{x[0]}; },
                               [](const Vec&, const Vec&) { return Vec{0.0}; });
  IntegrateOptions o;
  o.record_every = 10;
  o.channels = {{"U", [](const Vec& x, const Vec&) { return std::fabs(x[0]); }}};
  const auto tr = integrate(sys, {0.1}, {0.0}, 1e-2, 1.0, o);
  const auto r = monitor_lyapunov(tr, "U");
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_increment, 1e-3);
}

TEST(Monitor, UnknownChannelIsDomainError) {
  Trajectory tr;
  EXPECT_THROW(monitor_lyapunov(tr, "nope"), DomainError);
}

TEST(Ensemble, CirclePoints) {
  const auto sys = example::example_system(example::delta_tilde());
  const auto origin = circle_points(sys, 0.0, 16);
  ASSERT_EQ(origin.size(), 1u);
  EXPECT_EQ(origin[0].first[0], 0.0);
  const auto pts = circle_points(sys, 2.0, 4);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[0].first[0], 2.0);
  EXPECT_EQ(pts[0].second[0], 0.0);
  EXPECT_NEAR(pts[1].second[0], 2.0, 1e-15);
  for (const auto& [x, z] : pts) EXPECT_NEAR(std::hypot(x[0], z[0]), 2.0, 1e-14);
}

TEST(Ensemble, RadiusZeroIsSingleTrivialTrajectory) {
  const auto sys = example::example_system(example::delta_tilde());
  const auto r = simulate_ensemble(sys, 0.0, 16, 1e-3, 1.0, {});
  ASSERT_EQ(r.members.size(), 1u);
  EXPECT_EQ(r.members[0].final_norm, 0.0);
  EXPECT_EQ(r.members[0].outcome, Outcome::converged_to_origin);
}

TEST(Ensemble, SetTargetAndDivergence) {
  const auto grow = make_system([](const Vec& x, const Vec&) { return Vec{x[0] * x[0]}; },
                                [](const Vec&, const Vec&) { return Vec{0.0}; });
  const auto r = simulate_ensemble(grow, 2.0, 2, 1e-3, 1.0, {});
  EXPECT_TRUE(r.members[0].blowup);
  EXPECT_EQ(r.members[0].outcome, Outcome::diverged);
  EXPECT_FALSE(r.all_converged());

  const auto sys = example::example_system(example::delta_tilde());
  ConvergenceTarget set;
  set.to_origin = false;
  set.U = [](const Vec& x, const Vec& z) { return std::max(std::fabs(x[0]), std::fabs(z[0])); };
  set.level = 0.1;
  const auto s = simulate_ensemble(sys, 0.5, 4, 1e-3, 30.0, set);
  for (const auto& m : s.members) EXPECT_EQ(m.outcome, Outcome::converged_to_set);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace rsg
