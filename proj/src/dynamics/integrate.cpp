#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include "rsg/dynamics.hpp"
#include "rsg/errors.hpp"

namespace rsg {
namespace {

Vec stage(const Vec& y, double c, const Vec& k) {
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + c * k[i];
  return out;
}

void advance(Vec& y, double h6, const Vec& k1, const Vec& k2, const Vec& k3, const Vec& k4) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = y[i] + h6 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
  }
}

double squared_norm(const Vec& x, const Vec& z) {
  double acc = 0.0;
  for (double v : x) acc = acc + v * v;
  for (double v : z) acc = acc + v * v;
  return acc;
}

void record(Trajectory& tr, double t, const Vec& x, const Vec& z,
            const std::vector<Channel>& channels) {
  tr.times.push_back(t);
  tr.x.push_back(x);
  tr.z.push_back(z);
  for (std::size_t c = 0; c < channels.size(); ++c) tr.channels[c].push_back(channels[c].fn(x, z));
}

Trajectory empty_trajectory(const std::vector<Channel>& channels) {
  Trajectory tr;
  for (const auto& c : channels) tr.channel_names.push_back(c.name);
  tr.channels.resize(channels.size());
  return tr;
}

}  // namespace

const std::vector<double>& Trajectory::channel(std::string_view name) const {
  for (std::size_t c = 0; c < channel_names.size(); ++c) {
    if (channel_names[c] == name) return channels[c];
  }
  throw DomainError("trajectory has no channel \"" + std::string(name) + "\"");
}

double Trajectory::norm(std::size_t i) const { return std::sqrt(squared_norm(x[i], z[i])); }

std::size_t step_count(double h, double T) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("step must be positive");
  if (!(T >= h) || !std::isfinite(T)) throw DomainError("horizon must be at least one step");
  const double r = T / h;
  const double n = std::round(r);
  if (std::fabs(r - n) > 1e-9 * n) throw DomainError("horizon is not a whole number of steps");
  return static_cast<std::size_t>(n);
}

Trajectory integrate(const InterconnectedSystem& sys, const Vec& x0, const Vec& z0, double h,
                     double T, const IntegrateOptions& opts) {
  if (x0.size() != sys.n || z0.size() != sys.m) throw DomainError("initial state dimension mismatch");
  const std::size_t steps = step_count(h, T);
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);
  const double hh = h * 0.5;
  const double h6 = h / 6.0;
  Trajectory tr = empty_trajectory(opts.channels);
  Vec x = x0, z = z0;
  record(tr, 0.0, x, z, opts.channels);
  for (std::size_t k = 1; k <= steps; ++k) {
    const Vec k1x = sys.f(x, z), k1z = sys.g(x, z);
    const Vec x2 = stage(x, hh, k1x), z2 = stage(z, hh, k1z);
    const Vec k2x = sys.f(x2, z2), k2z = sys.g(x2, z2);
    const Vec x3 = stage(x, hh, k2x), z3 = stage(z, hh, k2z);
    const Vec k3x = sys.f(x3, z3), k3z = sys.g(x3, z3);
    const Vec x4 = stage(x, h, k3x), z4 = stage(z, h, k3z);
    const Vec k4x = sys.f(x4, z4), k4z = sys.g(x4, z4);
    advance(x, h6, k1x, k2x, k3x, k4x);
    advance(z, h6, k1z, k2z, k3z, k4z);
    if (!(squared_norm(x, z) <= 1e12)) {
      std::ostringstream os;
      os << "state norm exceeded 1e6 at t = " << static_cast<double>(k) * h;
      throw Blowup(os.str());
    }
    if (k % every == 0 || k == steps) record(tr, static_cast<double>(k) * h, x, z, opts.channels);
  }
  return tr;
}

std::vector<double> default_tau_schedule() {
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(std::ldexp(1e-2, -k));
  return t;
}

DiniEstimate dini_forward(const std::function<double(const Vec&)>& phi,
                          const std::function<Vec(const Vec&)>& direction, const Vec& y,
                          std::span<const double> tau) {
  std::vector<double> fallback;
  if (tau.empty()) {
    fallback = default_tau_schedule();
    tau = fallback;
  }
  const double p0 = phi(y);
  if (!std::isfinite(p0)) throw NonFinite("phi is not finite at the base point");
  const Vec d = direction(y);
  std::vector<double> q;
  q.reserve(tau.size());
  for (double t : tau) {
    if (!(t > 0.0)) throw DomainError("tau schedule must be positive");
    const double p = phi(stage(y, t, d));
    if (!std::isfinite(p)) throw NonFinite("phi is not finite along the direction");
    q.push_back((p - p0) / t);
  }
  // Linear extrapolation to tau = 0 between neighbouring quotients removes the
  // O(tau) bias of smooth phi and leaves piecewise-constant quotients alone.
  std::vector<double> r;
  if (q.size() == 1) {
    r = q;
  } else {
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
      if (!(tau[k + 1] < tau[k])) throw DomainError("tau schedule must be decreasing");
      r.push_back((tau[k] * q[k + 1] - tau[k + 1] * q[k]) / (tau[k] - tau[k + 1]));
    }
  }
  const std::size_t tail = std::min<std::size_t>(8, r.size());
  const double best = *std::max_element(r.end() - static_cast<std::ptrdiff_t>(tail), r.end());
  const double spread = r.size() > 1 ? std::fabs(r.back() - r[r.size() - 2]) : 0.0;
  return {best, spread};
}

MonitorReport monitor_lyapunov(const Trajectory& tr, std::string_view channel,
                               const std::function<bool(std::size_t)>& active, double tol) {
  const auto& u = tr.channel(channel);
  MonitorReport r;
  r.max_increment = -kInf;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    if (active && !active(i)) continue;
    ++r.checked;
    const double inc = u[i + 1] - u[i];
    if (inc > r.max_increment) {
      r.max_increment = inc;
      r.worst_index = i;
    }
  }
  if (r.checked == 0) r.max_increment = 0.0;
  r.passed = r.max_increment <= tol;
  return r;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, bool header) {
  if (header) {
    os << "t,x,z";
    for (const auto& n : tr.channel_names) os << ',' << n;
    os << '\n';
  }
  for (std::size_t i = 0; i < tr.size(); ++i) {
    os << format_number(tr.times[i]) << ',' << format_number(tr.x[i][0]) << ','
       << format_number(tr.z[i][0]);
    for (const auto& c : tr.channels) os << ',' << format_number(c[i]);
    os << '\n';
  }
}

}  // namespace rsg
