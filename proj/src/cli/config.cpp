#include <cmath>
#include <fstream>
#include <set>

#include "rsg/cli.hpp"
#include "rsg/detail/formulas.hpp"
#include "rsg/errors.hpp"
#include "rsg/example.hpp"

namespace rsg::cli {
namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing '" + key + "'");
  return *it;
}

std::size_t count_from_json(const Json& j, const std::string& what) {
  const double v = number_from_json(j);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError(what + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool bool_from_json(const Json& j, const std::string& what) {
  if (!j.is_boolean()) throw ConfigError(what + " must be true or false");
  return j.get<bool>();
}

RunOptions options_from_json(const Json& j, std::vector<double>* knots) {
  require_keys(j,
               {"grid", "s_max", "samples", "seed", "tol_dini", "radius", "count", "step", "horizon",
                "tol", "record_dt", "workers", "threshold_swap", "analytic_dini", "sigma_knots"},
               "options");
  RunOptions o;
  auto num = [&](const char* k, std::optional<double>& dst) {
    if (j.contains(k)) dst = number_from_json(j[k]);
  };
  auto cnt = [&](const char* k, std::optional<std::size_t>& dst) {
    if (j.contains(k)) dst = count_from_json(j[k], std::string("options.") + k);
  };
  cnt("grid", o.grid);
  num("s_max", o.s_max);
  cnt("samples", o.samples);
  if (j.contains("seed")) o.seed = count_from_json(j["seed"], "options.seed");
  num("tol_dini", o.tol_dini);
  num("radius", o.radius);
  cnt("count", o.count);
  num("step", o.step);
  num("horizon", o.horizon);
  num("tol", o.tol);
  num("record_dt", o.record_dt);
  cnt("workers", o.workers);
  if (j.contains("threshold_swap")) o.threshold_swap = bool_from_json(j["threshold_swap"], "threshold_swap");
  if (j.contains("analytic_dini")) o.analytic_dini = bool_from_json(j["analytic_dini"], "analytic_dini");
  if (j.contains("sigma_knots")) {
    const auto& k = j["sigma_knots"];
    require_keys(k, {"lo", "hi", "n"}, "options.sigma_knots");
    const double lo = number_from_json(field(k, "lo", "sigma_knots"));
    const double hi = number_from_json(field(k, "hi", "sigma_knots"));
    const auto n = count_from_json(field(k, "n", "sigma_knots"), "sigma_knots.n");
    if (!(lo > 0.0 && hi > lo && n >= 2)) throw ConfigError("sigma_knots needs 0 < lo < hi and n >= 2");
    *knots = log_knots(lo, hi, n);
  }
  return o;
}

TailComparator comparator_from_json(const Json& j) {
  const auto s = j.is_string() ? j.get<std::string>() : std::string();
  if (s == to_string(TailComparator::affine_beats_cube_root)) return TailComparator::affine_beats_cube_root;
  if (s == to_string(TailComparator::affine_beats_affine)) return TailComparator::affine_beats_affine;
  throw ConfigError("tail.comparator must be '" +
                    std::string(to_string(TailComparator::affine_beats_cube_root)) + "' or '" +
                    to_string(TailComparator::affine_beats_affine) + "'");
}

double abs_dini(double y, double d) { return y != 0.0 ? detail::sign_of(y) * d : std::fabs(d); }

LoadedProblem user_problem(const Json& j) {
  require_keys(j, {"schema", "name", "system", "decay", "bundle", "tail", "options"}, "config");
  LoadedProblem lp;
  Problem& p = lp.problem;
  p.name = j.value("name", std::string("user"));

  const auto& sj = field(j, "system", "config");
  require_keys(sj, {"family", "drift", "feedback"}, "system");
  if (field(sj, "family", "system") != "scalar-loop") {
    throw ConfigError("system.family must be 'scalar-loop'");
  }
  const auto drift = function_from_json(field(sj, "drift", "system"));
  const auto feedback = function_from_json(field(sj, "feedback", "system"));
  try {
    p.system = loop_system(drift, feedback);
    p.system.check_equilibrium();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }

  const auto& dj = field(j, "decay", "config");
  require_keys(dj, {"x", "z"}, "decay");
  const auto lx = function_from_json(field(dj, "x", "decay"));
  const auto lz = function_from_json(field(dj, "z", "decay"));

  const auto& bj = field(j, "bundle", "config");
  require_keys(bj, {"local_gain", "M_ell", "global_gain", "M_g", "cross_gain", "theorem1_gain",
                   "theorem1_delta"},
               "bundle");
  auto& b = p.bundle;
  b.local_gain = gain_from_json(field(bj, "local_gain", "bundle"));
  b.M_ell = number_from_json(field(bj, "M_ell", "bundle"));
  b.global_gain = gain_from_json(field(bj, "global_gain", "bundle"));
  b.M_g = number_from_json(field(bj, "M_g", "bundle"));
  b.cross_gain = gain_from_json(field(bj, "cross_gain", "bundle"));
  if (bj.contains("theorem1_gain")) lp.theorem1_gain = gain_from_json(bj["theorem1_gain"]);
  if (bj.contains("theorem1_delta")) lp.theorem1_delta = gain_from_json(bj["theorem1_delta"]);
  if (!(b.M_ell > 0.0) || !(b.M_g > 0.0)) throw ConfigError("bundle thresholds must be positive");

  const auto id = ComparisonFunction::identity();
  auto absval = [](const Vec& v) { return std::fabs(v[0]); };
  p.V = IssCertificate{"V", absval, id, id,
                       [lx](const Vec& x) { return lx(std::fabs(x[0])); },
                       b.local_gain, Region::sublevel(b.M_ell)};
  p.W = IssCertificate{"W", absval, id, id,
                       [lz](const Vec& z) { return lz(std::fabs(z[0])); },
                       b.cross_gain, Region::all()};
  const auto sys = p.system;
  p.dini_V = [sys](const Vec& x, const Vec& z) { return abs_dini(x[0], sys.f(x, z)[0]); };
  p.dini_W = [sys](const Vec& x, const Vec& z) { return abs_dini(z[0], sys.g(x, z)[0]); };

  if (j.contains("tail")) {
    const auto& tj = j["tail"];
    require_keys(tj, {"threshold", "comparator"}, "tail");
    TailCertificate t;
    if (tj.contains("threshold")) t.threshold = number_from_json(tj["threshold"]);
    if (tj.contains("comparator")) t.comparator = comparator_from_json(tj["comparator"]);
    p.tail = t;
  }
  p.sigma_knots = log_knots(1e-4, 10.0, 96);
  if (j.contains("options")) lp.defaults = options_from_json(j["options"], &p.sigma_knots);
  return lp;
}

LoadedProblem builtin_problem() {
  LoadedProblem lp;
  lp.problem = example::example_problem();
  lp.builtin = true;
  lp.theorem1_gain = Gain(example::gamma_capital());
  lp.theorem1_delta = Gain(ComparisonFunction::branch_inverse(example::delta_tilde(), 0.0, kInf));
  lp.defaults.threshold_swap = true;
  return lp;
}

}  // namespace

LoadedProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  if (!j.contains("schema")) throw ConfigError("config: missing 'schema'");
  if (number_from_json(j["schema"]) != 1.0) throw ConfigError("config: unsupported schema version");
  if (j.contains("problem")) {
    require_keys(j, {"schema", "problem", "options"}, "config");
    if (j["problem"] != "example1") throw ConfigError("config: unknown built-in problem");
    auto lp = builtin_problem();
    if (j.contains("options")) {
      auto o = options_from_json(j["options"], &lp.problem.sigma_knots);
      if (!o.threshold_swap) o.threshold_swap = true;
      lp.defaults = o;
    }
    return lp;
  }
  return user_problem(j);
}

LoadedProblem load_problem(const std::string& spec) {
  if (spec == "example1") return builtin_problem();
  std::ifstream is(spec, std::ios::binary);
  if (!is) throw ConfigError("cannot open problem file '" + spec + "'");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::exception& e) {
    throw ConfigError("'" + spec + "': " + e.what());
  }
  return problem_from_json(j);
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RSG_OUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace rsg::cli
