#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsg/comparison_function.hpp"
#include "rsg/kernels.hpp"

namespace rsg {

using Vec = std::vector<double>;
using Field = std::function<Vec(const Vec& x, const Vec& z)>;
using StateFn = std::function<double(const Vec& x, const Vec& z)>;

// Closed-form right-hand side xdot = z - P(x), zdot = x - sign(z) Q(|z|) for
// scalar x, z. Lets ensembles run on the batched kernels.
struct LoopFamily {
  std::array<double, 4> drift{};
  std::vector<double> q_start, q_value, q_slope;

  kernels::LoopRhs rhs() const;
  // P must be a single cubic piece and Q piecewise affine.
  static LoopFamily from(const ComparisonFunction& P, const ComparisonFunction& Q);
};

struct InterconnectedSystem {
  std::size_t n = 1;
  std::size_t m = 1;
  Field f;
  Field g;
  std::optional<LoopFamily> loop;

  // Throws DomainError unless f(0,0) and g(0,0) vanish to 1e-12.
  void check_equilibrium() const;
};

// Builds the loop system from P and Q, with generic fields that round exactly
// like the kernel.
InterconnectedSystem loop_system(const ComparisonFunction& P, const ComparisonFunction& Q);

struct Channel {
  std::string name;
  StateFn fn;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> x, z;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;

  std::size_t size() const { return times.size(); }
  const std::vector<double>& channel(std::string_view name) const;
  double norm(std::size_t i) const;
};

struct IntegrateOptions {
  std::size_t record_every = 1;  // steps between stored samples
  std::vector<Channel> channels;
};

// Classical RK4 with fixed step; sign(0) = 0 in every field this library
// builds. Throws Blowup once |(x, z)| exceeds 1e6.
Trajectory integrate(const InterconnectedSystem& sys, const Vec& x0, const Vec& z0, double h,
                     double T, const IntegrateOptions& opts = {});

// Number of steps for horizon T, rejecting horizons that are not a whole
// number of steps to 1e-9 relative.
std::size_t step_count(double h, double T);

struct DiniEstimate {
  double value;
  double spread;  // difference of the last two extrapolated quotients
};

std::vector<double> default_tau_schedule();

// limsup surrogate of (phi(y + tau d(y)) - phi(y)) / tau: the largest of the
// last 8 extrapolated quotients along the (decreasing) schedule.
DiniEstimate dini_forward(const std::function<double(const Vec&)>& phi,
                          const std::function<Vec(const Vec&)>& direction, const Vec& y,
                          std::span<const double> tau = {});

struct MonitorReport {
  double max_increment = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool passed = true;
};

// Largest U[i+1] - U[i] over samples i where `active(i)` holds.
MonitorReport monitor_lyapunov(const Trajectory& tr, std::string_view channel,
                               const std::function<bool(std::size_t)>& active = {},
                               double tol = 1e-6);

enum class Outcome { converged_to_origin, converged_to_set, diverged };
const char* to_string(Outcome o);

struct ConvergenceTarget {
  bool to_origin = true;
  double tol = 1e-3;  // origin target: final |(x, z)| <= tol
  StateFn U;          // set target: final U <= level
  double level = 0.0;
};

struct EntryWatch {
  StateFn U;
  double level = 0.0;
};

struct MemberResult {
  Vec x0, z0, xf, zf;
  double final_norm = 0.0;
  double final_U = 0.0;
  Outcome outcome = Outcome::diverged;
  bool blowup = false;
  std::optional<double> entry_time;  // first stored sample with U <= level
  Trajectory trajectory;             // empty unless kept
};

struct EnsembleOptions {
  std::size_t workers = 1;
  std::size_t record_every = 50;
  std::vector<Channel> channels;
  bool keep_trajectories = false;
  std::optional<EntryWatch> entry;
  bool use_kernels = true;  // batched path when the system has a loop family
};

struct ConvergenceReport {
  double radius = 0.0;
  double step = 0.0;
  double horizon = 0.0;
  std::vector<MemberResult> members;
  std::size_t converged() const;
  bool all_converged() const { return converged() == members.size(); }
};

// Initial points equally spaced on the circle of the given radius in the
// (x[0], z[0]) plane; radius 0 gives the single equilibrium trajectory.
std::vector<std::pair<Vec, Vec>> circle_points(const InterconnectedSystem& sys, double radius,
                                               std::size_t count);

ConvergenceReport simulate_ensemble(const InterconnectedSystem& sys, double radius,
                                    std::size_t count, double h, double T,
                                    const ConvergenceTarget& target,
                                    const EnsembleOptions& opts = {});

// Shortest round-trip decimal form; the basis of byte-identical outputs.
std::string format_number(double v);

// Header t,x,z,<channels>; x and z are the first coordinates.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr, bool header = true);

}  // namespace rsg
