#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "rsg/dynamics.hpp"
#include "rsg/errors.hpp"

namespace rsg {
namespace {

struct Recorder {
  const EnsembleOptions& opts;
  MemberResult& out;

  void sample(double t, const Vec& x, const Vec& z) {
    if (opts.entry && !out.entry_time && opts.entry->U(x, z) <= opts.entry->level) out.entry_time = t;
    if (!opts.keep_trajectories) return;
    auto& tr = out.trajectory;
    tr.times.push_back(t);
    tr.x.push_back(x);
    tr.z.push_back(z);
    for (std::size_t c = 0; c < opts.channels.size(); ++c) {
      tr.channels[c].push_back(opts.channels[c].fn(x, z));
    }
  }
};

void classify(MemberResult& r, const ConvergenceTarget& target) {
  double ss = 0.0;
  for (double v : r.xf) ss = ss + v * v;
  for (double v : r.zf) ss = ss + v * v;
  r.final_norm = std::sqrt(ss);
  if (target.U) r.final_U = target.U(r.xf, r.zf);
  if (r.blowup) {
    r.outcome = Outcome::diverged;
  } else if (target.to_origin) {
    r.outcome = r.final_norm <= target.tol ? Outcome::converged_to_origin : Outcome::diverged;
  } else {
    r.outcome = r.final_U <= target.level ? Outcome::converged_to_set : Outcome::diverged;
  }
}

void run_generic(const InterconnectedSystem& sys, double h, double T, const EnsembleOptions& opts,
                 MemberResult& r) {
  IntegrateOptions io;
  io.record_every = opts.record_every;
  // The trajectory is needed for entry detection even when not kept.
  try {
    const auto tr = integrate(sys, r.x0, r.z0, h, T, io);
    Recorder rec{opts, r};
    for (std::size_t i = 0; i < tr.size(); ++i) rec.sample(tr.times[i], tr.x[i], tr.z[i]);
    r.xf = tr.x.back();
    r.zf = tr.z.back();
  } catch (const Blowup&) {
    r.blowup = true;
    r.xf = r.x0;
    r.zf = r.z0;
    for (auto& v : r.xf) v = kInf;
    for (auto& v : r.zf) v = kInf;
  }
}

// Batched RK4 over a slice of scalar members; records at the same steps as
// integrate().
void run_kernel(const LoopFamily& fam, double h, std::size_t steps, const EnsembleOptions& opts,
                std::span<MemberResult> members) {
  const auto rhs = fam.rhs();
  const std::size_t n = members.size();
  std::vector<double> x(n), z(n);
  std::vector<std::uint8_t> alive(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = members[i].x0[0];
    z[i] = members[i].z0[0];
    Recorder{opts, members[i]}.sample(0.0, {x[i]}, {z[i]});
  }
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);
  const auto& k = kernels::active();
  for (std::size_t done = 0; done < steps;) {
    const std::size_t chunk = std::min(every, steps - done);
    k.loop_rk4(rhs, x.data(), z.data(), alive.data(), n, h, chunk);
    done += chunk;
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i]) {
        Recorder{opts, members[i]}.sample(static_cast<double>(done) * h, {x[i]}, {z[i]});
      } else {
        members[i].blowup = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    members[i].xf = {members[i].blowup ? kInf : x[i]};
    members[i].zf = {members[i].blowup ? kInf : z[i]};
  }
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::converged_to_origin: return "converged-to-origin";
    case Outcome::converged_to_set: return "converged-to-set";
    case Outcome::diverged: return "diverged";
  }
  return "?";
}

std::size_t ConvergenceReport::converged() const {
  return static_cast<std::size_t>(std::count_if(members.begin(), members.end(), [](const auto& m) {
    return m.outcome != Outcome::diverged;
  }));
}

std::vector<std::pair<Vec, Vec>> circle_points(const InterconnectedSystem& sys, double radius,
                                               std::size_t count) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("radius must be nonnegative");
  if (count < 1) throw DomainError("count must be at least 1");
  std::vector<std::pair<Vec, Vec>> pts;
  if (radius == 0.0) {
    pts.emplace_back(Vec(sys.n, 0.0), Vec(sys.m, 0.0));
    return pts;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    Vec x(sys.n, 0.0), z(sys.m, 0.0);
    x[0] = radius * std::cos(th);
    z[0] = radius * std::sin(th);
    pts.emplace_back(std::move(x), std::move(z));
  }
  return pts;
}

ConvergenceReport simulate_ensemble(const InterconnectedSystem& sys, double radius,
                                    std::size_t count, double h, double T,
                                    const ConvergenceTarget& target, const EnsembleOptions& opts) {
  const std::size_t steps = step_count(h, T);
  if (!target.to_origin && !target.U) throw DomainError("set target needs a function U");
  ConvergenceReport rep;
  rep.radius = radius;
  rep.step = h;
  rep.horizon = T;
  for (auto& [x0, z0] : circle_points(sys, radius, count)) {
    MemberResult m;
    m.x0 = x0;
    m.z0 = z0;
    for (const auto& c : opts.channels) m.trajectory.channel_names.push_back(c.name);
    m.trajectory.channels.resize(opts.channels.size());
    rep.members.push_back(std::move(m));
  }
  const bool batched = opts.use_kernels && sys.loop && sys.n == 1 && sys.m == 1;
  const std::size_t n = rep.members.size();
  const std::size_t workers = std::clamp<std::size_t>(opts.workers, 1, n);
  auto work = [&](std::size_t lo, std::size_t hi) {
    std::span<MemberResult> slice(rep.members.data() + lo, hi - lo);
    if (batched) {
      run_kernel(*sys.loop, h, steps, opts, slice);
    } else {
      for (auto& m : slice) run_generic(sys, h, T, opts, m);
    }
  };
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(work, n * w / workers, n * (w + 1) / workers);
    }
    for (auto& t : pool) t.join();
  }
  for (auto& m : rep.members) classify(m, target);
  return rep;
}

}  // namespace rsg
