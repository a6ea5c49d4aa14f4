#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rsg/cli.hpp"
#include "rsg/errors.hpp"
#include "rsg/example.hpp"

namespace rsg::cli {
namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string problem = "example1";
  std::string suite = "all";
  std::optional<std::string> out_dir;
  std::string dini;
  RunOptions run;
  int figure = 0;
  std::string spec;
};

template <class T>
std::optional<T> pick(const std::optional<T>& flag, const std::optional<T>& config) {
  return flag ? flag : config;
}

RunOptions merged(const RunOptions& flags, const RunOptions& cfg) {
  RunOptions o;
  o.grid = pick(flags.grid, cfg.grid);
  o.s_max = pick(flags.s_max, cfg.s_max);
  o.samples = pick(flags.samples, cfg.samples);
  o.seed = pick(flags.seed, cfg.seed);
  o.tol_dini = pick(flags.tol_dini, cfg.tol_dini);
  o.radius = pick(flags.radius, cfg.radius);
  o.count = pick(flags.count, cfg.count);
  o.step = pick(flags.step, cfg.step);
  o.horizon = pick(flags.horizon, cfg.horizon);
  o.tol = pick(flags.tol, cfg.tol);
  o.record_dt = pick(flags.record_dt, cfg.record_dt);
  o.workers = pick(flags.workers, cfg.workers);
  o.threshold_swap = pick(flags.threshold_swap, cfg.threshold_swap);
  o.analytic_dini = pick(flags.analytic_dini, cfg.analytic_dini);
  return o;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

std::filesystem::path prepare_out_dir(const std::optional<std::string>& flag) {
  auto dir = resolve_out_dir(flag);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  return dir;
}

void apply_check_options(Problem& p, const RunOptions& o) {
  if (o.grid) {
    if (*o.grid < 2) throw ConfigError("--grid must be at least 2");
    p.grid_n = *o.grid;
  }
  if (o.s_max) {
    if (!(*o.s_max > 0.0) || !std::isfinite(*o.s_max)) throw ConfigError("--s-max must be positive");
    p.s_max = *o.s_max;
  }
  if (o.samples) {
    if (*o.samples == 0) throw ConfigError("--samples must be positive");
    p.implication.sampler.samples = *o.samples;
  }
  if (o.seed) p.implication.sampler.seed = *o.seed;
  if (o.tol_dini) {
    if (!(*o.tol_dini >= 0.0)) throw ConfigError("--tol-dini must be non-negative");
    p.implication.tol_dini = *o.tol_dini;
  }
  if (o.analytic_dini) p.analytic_dini = *o.analytic_dini;
}

const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> s{"assumption1", "local", "global", "global-literal",
                                          "global-theorem1", "theorem2"};
  return s;
}

std::vector<std::string> parse_suites(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "all") {
      out.insert(out.end(), all_suites().begin(), all_suites().end());
      continue;
    }
    if (std::find(all_suites().begin(), all_suites().end(), item) == all_suites().end()) {
      throw ConfigError("unknown suite '" + item + "'");
    }
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("no suite selected");
  return out;
}

// delta~^{-1}(Gamma(s)) against s at the worst grid point of the example.
void add_example_witness_note(CheckReport& r) {
  if (!r.argmin || r.passed()) return;
  const double s = *r.argmin;
  const double g = example::gamma_capital()(s);
  const auto inv = ComparisonFunction::branch_inverse(example::delta_tilde(), 0.0, kInf);
  const double v = inv(g);
  r.notes.push_back("witness s = " + format_number(s) + ": delta~^-1(Gamma(s)) = " +
                    format_number(v) + (v > s ? " > s" : " <= s"));
}

CheckReport run_suite(const std::string& suite, const LoadedProblem& lp, const RunOptions& o) {
  const Problem& p = lp.problem;
  try {
    if (suite == "assumption1") return verify_assumption1(p);
    if (suite == "local") return verify_local_assumptions(p);
    if (suite == "global") {
      auto r = verify_global_assumptions(p, Orientation::delta_after_gamma);
      r.id = "global";
      return r;
    }
    if (suite == "global-literal") {
      auto r = verify_global_assumptions(p, Orientation::gamma_after_delta);
      r.id = "global-literal";
      return r;
    }
    if (suite == "global-theorem1") {
      const Gain gamma = lp.theorem1_gain ? *lp.theorem1_gain : p.bundle.global_gain;
      const Gain delta = lp.theorem1_delta ? *lp.theorem1_delta : p.bundle.cross_gain;
      auto r = check_global_small_gain(gamma, delta, p.s_max, p.grid_n,
                                       Orientation::delta_after_gamma, p.tail);
      r.id = "global-theorem1";
      if (lp.builtin) add_example_witness_note(r);
      return r;
    }
    Theorem2Options t2;
    t2.threshold_swap = o.threshold_swap.value_or(false);
    auto res = verify_theorem2(p, t2);
    res.report.id = "theorem2";
    return res.report;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    CheckReport r;
    r.id = suite;
    r.violation_count = 1;
    r.notes.push_back(std::string("undecided: ") + e.what());
    return r;
  }
}

int cmd_check(const Flags& f, std::ostream& out) {
  auto lp = load_problem(f.problem);
  const auto o = merged(f.run, lp.defaults);
  apply_check_options(lp.problem, o);
  const auto suites = parse_suites(f.suite);
  const auto dir = prepare_out_dir(f.out_dir);

  Json reports = Json::array();
  bool ok = true;
  for (const auto& s : suites) {
    const auto r = run_suite(s, lp, o);
    print_table(out, r);
    ok = ok && r.passed();
    reports.push_back(to_json(r));
  }
  Json j;
  j["schema"] = 1;
  j["problem"] = lp.problem.name;
  j["passed"] = ok;
  j["suites"] = reports;
  open_out(dir / "check_report.json") << j.dump(2) << '\n';
  out << (ok ? "all requested checks passed" : "some checks failed") << '\n';
  return ok ? kExitPass : kExitFail;
}

std::vector<Channel> channels_for(const LoadedProblem& lp, std::optional<EntryWatch>* entry) {
  if (lp.builtin) {
    const auto& a = example::artifacts();
    const auto sg = a.global.sigma.sigma;
    *entry = EntryWatch{[sg](const Vec& x, const Vec& z) {
                          return std::max(sg(std::fabs(x[0])), std::fabs(z[0]));
                        },
                        a.global.U.level_constant};
    return example::example_channels();
  }
  return {{"V", [](const Vec& x, const Vec&) { return std::fabs(x[0]); }},
          {"W", [](const Vec&, const Vec& z) { return std::fabs(z[0]); }}};
}

int cmd_simulate(const Flags& f, std::ostream& out) {
  auto lp = load_problem(f.problem);
  const auto o = merged(f.run, lp.defaults);
  const double M_ell = lp.problem.bundle.M_ell;
  const double radius = o.radius.value_or(M_ell);
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw ConfigError("--radius must be >= 0");
  const std::size_t count = o.count.value_or(16);
  if (count == 0) throw ConfigError("--count must be positive");
  const double h = o.step.value_or(1e-3);
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("--step must be positive");
  const bool local = radius <= M_ell;
  const double T = o.horizon.value_or(local ? 200.0 : 500.0);
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("--horizon must be positive");
  const double tol = o.tol.value_or(local ? 1e-3 : 1e-2);
  if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
  const double record_dt = o.record_dt.value_or(0.05);
  const double every = std::round(record_dt / h);
  if (!(every >= 1.0) || std::fabs(every * h - record_dt) > 1e-9 * record_dt) {
    throw ConfigError("--record-dt must be a positive multiple of --step");
  }
  try {
    (void)step_count(h, T);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  EnsembleOptions eo;
  eo.workers = o.workers.value_or(1);
  if (eo.workers == 0) throw ConfigError("--workers must be positive");
  eo.record_every = static_cast<std::size_t>(every);
  eo.keep_trajectories = true;
  eo.channels = channels_for(lp, &eo.entry);
  ConvergenceTarget target;
  target.tol = tol;
  const auto rep = simulate_ensemble(lp.problem.system, radius, count, h, T, target, eo);

  const auto dir = prepare_out_dir(f.out_dir);
  Json members = Json::array();
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& m = rep.members[i];
    char name[32];
    std::snprintf(name, sizeof name, "traj_%03zu.csv", i);
    auto os = open_out(dir / name);
    write_trajectory_csv(os, m.trajectory);
    Json mj;
    mj["index"] = i;
    mj["csv"] = name;
    mj["x0"] = number_to_json(m.x0[0]);
    mj["z0"] = number_to_json(m.z0[0]);
    mj["xf"] = number_to_json(m.xf[0]);
    mj["zf"] = number_to_json(m.zf[0]);
    mj["final_norm"] = number_to_json(m.final_norm);
    mj["outcome"] = to_string(m.outcome);
    mj["blowup"] = m.blowup;
    mj["entry_time"] = m.entry_time ? number_to_json(*m.entry_time) : Json(nullptr);
    members.push_back(mj);
  }
  Json s;
  s["schema"] = 1;
  s["problem"] = lp.problem.name;
  s["radius"] = number_to_json(radius);
  s["step"] = number_to_json(h);
  s["horizon"] = number_to_json(T);
  s["tol"] = number_to_json(tol);
  s["count"] = rep.members.size();
  s["converged"] = rep.converged();
  s["members"] = members;
  open_out(dir / "ensemble_summary.json") << s.dump(2) << '\n';

  out << "radius " << format_number(radius) << ", " << rep.members.size() << " trajectories, "
      << rep.converged() << " converged to |(x,z)| <= " << format_number(tol) << " by T = "
      << format_number(T) << '\n';
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& m = rep.members[i];
    out << "  " << i << "  " << to_string(m.outcome) << "  final |(x,z)| "
        << format_number(m.final_norm) << '\n';
  }
  return rep.all_converged() ? kExitPass : kExitFail;
}

int cmd_reproduce(const Flags& f, std::ostream& out) {
  if (f.figure != 1 && f.figure != 2) {
    throw ConfigError("unknown figure " + std::to_string(f.figure) + " (expected 1 or 2)");
  }
  example::Fig2Options o;
  if (f.run.workers) {
    if (*f.run.workers == 0) throw ConfigError("--workers must be positive");
    o.workers = *f.run.workers;
  }
  if (f.run.step) {
    if (!(*f.run.step > 0.0)) throw ConfigError("--step must be positive");
    o.h = *f.run.step;
  }
  const auto dir = prepare_out_dir(f.out_dir);
  for (const auto& name : example::write_figure_data(f.figure, dir, o)) {
    out << "wrote " << (dir / name).string() << '\n';
  }
  return kExitPass;
}

Json bridge_to_json(const KinfBridge& b) {
  Json j;
  j["kind"] = "kinf";
  j["p"] = number_to_json(b.p);
  j["q"] = number_to_json(b.q);
  j["epsilon"] = number_to_json(b.epsilon);
  j["K"] = number_to_json(b.K);
  j["A"] = number_to_json(b.A);
  j["B"] = number_to_json(b.B);
  j["function"] = function_to_json(b.fn);
  return j;
}

std::vector<double> knots_from_json(const Json& j) {
  if (j.is_array()) {
    std::vector<double> k;
    for (const auto& v : j) k.push_back(number_from_json(v));
    return k;
  }
  if (!j.is_object()) throw ConfigError("knots: expected an array or {lo, hi, n}");
  for (const auto& [key, v] : j.items()) {
    if (key != "lo" && key != "hi" && key != "n") throw ConfigError("knots: unknown key '" + key + "'");
  }
  const double lo = number_from_json(j.at("lo"));
  const double hi = number_from_json(j.at("hi"));
  const double n = number_from_json(j.at("n"));
  if (!(lo > 0.0 && hi > lo && n >= 2.0 && n == std::floor(n))) {
    throw ConfigError("knots needs 0 < lo < hi and integer n >= 2");
  }
  return log_knots(lo, hi, static_cast<std::size_t>(n));
}

int cmd_bridge(const Flags& f, std::ostream& out) {
  std::ifstream is(f.spec, std::ios::binary);
  if (!is) throw ConfigError("cannot open bridge spec '" + f.spec + "'");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::exception& e) {
    throw ConfigError("'" + f.spec + "': " + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || number_from_json(j["schema"]) != 1.0) {
    throw ConfigError("bridge spec needs \"schema\": 1");
  }
  const std::string kind = j.value("kind", "");
  Json result;
  if (kind == "kinf") {
    for (const auto& [key, v] : j.items()) {
      if (key != "schema" && key != "kind" && key != "alpha" && key != "beta" && key != "p" &&
          key != "q" && key != "epsilon") {
        throw ConfigError("bridge spec: unknown key '" + key + "'");
      }
    }
    if (!j.contains("alpha") || !j.contains("beta") || !j.contains("p") || !j.contains("q")) {
      throw ConfigError("kinf bridge needs alpha, beta, p and q");
    }
    std::optional<double> eps;
    if (j.contains("epsilon")) eps = number_from_json(j["epsilon"]);
    const double p = number_from_json(j["p"]);
    const double q = number_from_json(j["q"]);
    if (!(p >= 0.0 && q > p)) throw ConfigError("kinf bridge needs 0 <= p < q");
    const auto b = build_kinf_bridge(function_from_json(j["alpha"]), function_from_json(j["beta"]),
                                     p, q, eps);
    result = bridge_to_json(b);
    out << "kinf bridge: K " << format_number(b.K) << ", A " << format_number(b.A) << ", B "
        << format_number(b.B) << ", epsilon " << format_number(b.epsilon) << '\n';
  } else if (kind == "smooth") {
    for (const auto& [key, v] : j.items()) {
      if (key != "schema" && key != "kind" && key != "lower" && key != "upper" && key != "knots") {
        throw ConfigError("bridge spec: unknown key '" + key + "'");
      }
    }
    if (!j.contains("lower") || !j.contains("upper")) {
      throw ConfigError("smooth bridge needs lower and upper");
    }
    const auto knots = j.contains("knots") ? knots_from_json(j["knots"]) : log_knots(1e-4, 10.0, 96);
    const auto b = build_smooth_bridge(gain_from_json(j["lower"]), gain_from_json(j["upper"]), knots);
    result["kind"] = "smooth";
    result["repair_rounds"] = b.repair_rounds;
    result["min_margin"] = number_to_json(b.min_margin);
    result["knot_count"] = b.knots.size();
    result["function"] = function_to_json(b.sigma);
    out << "smooth bridge: " << b.knots.size() << " knots, " << b.repair_rounds
        << " repair rounds, min sandwich margin " << format_number(b.min_margin) << '\n';
  } else {
    throw ConfigError("bridge spec kind must be 'kinf' or 'smooth'");
  }
  const auto dir = prepare_out_dir(f.out_dir);
  result["schema"] = 1;
  open_out(dir / "bridge.json") << result.dump(2) << '\n';
  return kExitPass;
}

void add_check_flags(CLI::App* c, Flags& f) {
  c->add_option("--grid", f.run.grid, "grid points for gain margins");
  c->add_option("--s-max", f.run.s_max, "end of the sampled gain range");
  c->add_option("--samples", f.run.samples, "state samples per implication check");
  c->add_option("--seed", f.run.seed, "sampler seed");
  c->add_option("--tol-dini", f.run.tol_dini, "slack on Dini implication checks");
  c->add_option("--dini", f.dini, "Dini derivative source")->check(CLI::IsMember({"numerical", "analytic"}));
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regional small-gain verification toolkit", "rsg"};
  app.require_subcommand(1);
  Flags f;

  auto* check = app.add_subcommand("check", "verify small-gain conditions and assumptions");
  check->add_option("--problem", f.problem, "example1 or a JSON config file");
  check->add_option("--suite", f.suite,
                    "comma list of assumption1, local, global, global-literal, global-theorem1, "
                    "theorem2, all");
  check->add_option("--out-dir", f.out_dir, "output directory (default $RSG_OUT_DIR or .)");
  add_check_flags(check, f);
  bool swap = false, no_swap = false;
  check->add_flag("--threshold-swap", swap, "order the thresholds before Theorem 2");
  check->add_flag("--no-threshold-swap", no_swap, "use the thresholds as given");

  auto* sim = app.add_subcommand("simulate", "integrate an ensemble from a circle of initial states");
  sim->add_option("--problem", f.problem, "example1 or a JSON config file");
  sim->add_option("--radius", f.run.radius, "radius of the initial circle");
  sim->add_option("--count", f.run.count, "number of trajectories");
  sim->add_option("--step", f.run.step, "RK4 step");
  sim->add_option("--horizon", f.run.horizon, "final time");
  sim->add_option("--tol", f.run.tol, "origin target on the final |(x,z)|");
  sim->add_option("--record-dt", f.run.record_dt, "time between stored samples");
  sim->add_option("--workers", f.run.workers, "worker threads");
  sim->add_option("--out-dir", f.out_dir, "output directory (default $RSG_OUT_DIR or .)");

  auto* rep = app.add_subcommand("reproduce", "write the figure data tables");
  rep->add_option("--figure", f.figure, "figure number (1 or 2)")->required();
  rep->add_option("--workers", f.run.workers, "worker threads");
  rep->add_option("--step", f.run.step, "RK4 step for figure 2");
  rep->add_option("--out-dir", f.out_dir, "output directory (default $RSG_OUT_DIR or .)");

  auto* br = app.add_subcommand("bridge", "build a K-infinity or smooth bridge from a JSON spec");
  br->add_option("--spec", f.spec, "bridge spec file")->required();
  br->add_option("--out-dir", f.out_dir, "output directory (default $RSG_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (swap && no_swap) throw ConfigError("--threshold-swap and --no-threshold-swap conflict");
    if (swap) f.run.threshold_swap = true;
    if (no_swap) f.run.threshold_swap = false;
    if (!f.dini.empty()) f.run.analytic_dini = f.dini == "analytic";
    if (check->parsed()) return cmd_check(f, out);
    if (sim->parsed()) return cmd_simulate(f, out);
    if (rep->parsed()) return cmd_reproduce(f, out);
    return cmd_bridge(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace rsg::cli
