#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsg/certificates.hpp"

namespace rsg::example {

struct Constants {
  double eps_x = 0.05;
  double eps_z = 0.05;
  double M_ell = 0.236;
  double M_g = 0.245;
  double s1 = 0.95 * (25.0 / 108.0);  // 0.95 rho(5/6), jump of Gamma
  double s2 = 0.95 * 0.25;            // 0.95 rho(1/2), end of the local gain formula
};
const Constants& constants();

// rho(x) = 5x/4 - 2x^2 + x^3
const ComparisonFunction& rho();

enum class Branch { lower, upper };  // [0, 1/2] and [5/6, inf)
double rho_branch_inverse(Branch b, double y);
// s -> rho_b^{-1}(s / 0.95)
ComparisonFunction scaled_rho_inverse(Branch b);

const PiecewiseGain& gamma_capital();
const ComparisonFunction& gamma_ell();
const ComparisonFunction& gamma_g();

using Knots = std::vector<std::pair<double, double>>;
Knots default_delta_knots();
// Knots printed in the original construction; they fail validation.
Knots reference_delta_knots();

// Piecewise-affine delta~ through the knots (first knot (0,0)) with the given
// tail slope, validated on 4000-point grids. Throws ValidationFailed.
ComparisonFunction build_delta_tilde(const Knots& knots, double tail_slope = 1.0);
const ComparisonFunction& delta_tilde();  // default knots, validated once

// delta(s) = delta~^{-1}(s / (1 - eps_z)); the cross gain of the bundle.
ComparisonFunction cross_gain(const ComparisonFunction& dt);

InterconnectedSystem example_system(const ComparisonFunction& dt);

// D+V and D+W along the fields, with D+|.| at 0 equal to |direction|.
DiniOracle dini_V_oracle();
DiniOracle dini_W_oracle(const ComparisonFunction& dt);

Problem example_problem();
Problem example_problem(const ComparisonFunction& dt);

struct Artifacts {
  Problem problem;
  LocalBridge local;
  GlobalBridge global;
};
// Built on first use.
const Artifacts& artifacts();

// x* in [theta Gamma(s*), Gamma(s*)) with D+V(x*, z*) > 0 where |z*| = s*.
std::optional<std::pair<double, double>> check_gamma_optimality(double s_star, double theta);

struct Fig1Row {
  double s, id, Gamma, gamma_l, delta_tilde;
};
std::vector<Fig1Row> figure1_rows();

struct Fig2Options {
  double h = 1e-3;
  double T_local = 200.0;
  double T_global = 500.0;
  std::size_t count = 16;
  std::size_t record_every = 50;
  std::size_t workers = 1;
  std::optional<double> radius;  // single custom ensemble instead of both
};

std::vector<Channel> example_channels();

// Writes the figure tables into dir and returns the file names.
std::vector<std::string> write_figure_data(int figure, const std::filesystem::path& dir,
                                           const Fig2Options& opts = {});

// Concatenated trajectory blocks plus a JSON summary with row ranges.
void write_ensemble(const ConvergenceReport& rep, const std::filesystem::path& csv,
                    const std::filesystem::path& summary);

}  // namespace rsg::example
