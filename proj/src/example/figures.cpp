#include <cmath>
#include <fstream>

#include "rsg/errors.hpp"
#include "rsg/example.hpp"

namespace rsg::example {
namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

}  // namespace

std::vector<Fig1Row> figure1_rows() {
  const auto& G = gamma_capital();
  const auto& gl = gamma_ell();
  const auto& dt = delta_tilde();
  const double s2 = constants().s2;
  std::vector<Fig1Row> rows;
  auto row = [&](double s, double g, double l) { rows.push_back({s, s, g, l, dt(s)}); };
  bool jump_done = false;
  for (double s : make_grid(Interval::closed(0.225, 0.25), 2000)) {
    if (!jump_done && s >= s2) {
      row(s2, G.left_limit(s2), gl.left_limit(s2));
      row(s2, G(s2), gl(s2));
      jump_done = true;
    }
    row(s, G(s), gl(s));
  }
  return rows;
}

std::vector<Channel> example_channels() {
  const auto& a = artifacts();
  const auto sl = a.local.sigma.sigma;
  const auto sg = a.global.sigma.sigma;
  return {
      {"V", [](const Vec& x, const Vec&) { return std::fabs(x[0]); }},
      {"W", [](const Vec&, const Vec& z) { return std::fabs(z[0]); }},
      {"U_local", [sl](const Vec& x, const Vec& z) { return std::max(sl(std::fabs(x[0])), std::fabs(z[0])); }},
      {"U_global", [sg](const Vec& x, const Vec& z) { return std::max(sg(std::fabs(x[0])), std::fabs(z[0])); }},
  };
}

void write_ensemble(const ConvergenceReport& rep, const std::filesystem::path& csv,
                    const std::filesystem::path& summary) {
  auto os = open_out(csv);
  Json members = Json::array();
  std::size_t row = 0;
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& m = rep.members[i];
    write_trajectory_csv(os, m.trajectory, i == 0);
    Json j;
    j["index"] = i;
    j["x0"] = number_to_json(m.x0[0]);
    j["z0"] = number_to_json(m.z0[0]);
    j["xf"] = number_to_json(m.xf[0]);
    j["zf"] = number_to_json(m.zf[0]);
    j["final_norm"] = number_to_json(m.final_norm);
    j["outcome"] = to_string(m.outcome);
    j["blowup"] = m.blowup;
    j["entry_time"] = m.entry_time ? number_to_json(*m.entry_time) : Json(nullptr);
    j["rows"] = {row, row + m.trajectory.size()};
    row += m.trajectory.size();
    members.push_back(j);
  }
  Json s;
  s["radius"] = number_to_json(rep.radius);
  s["step"] = number_to_json(rep.step);
  s["horizon"] = number_to_json(rep.horizon);
  s["count"] = rep.members.size();
  s["converged"] = rep.converged();
  s["csv"] = csv.filename().string();
  s["members"] = members;
  auto js = open_out(summary);
  js << s.dump(2) << '\n';
}

std::vector<std::string> write_figure_data(int figure, const std::filesystem::path& dir,
                                           const Fig2Options& opts) {
  std::filesystem::create_directories(dir);
  if (figure == 1) {
    auto os = open_out(dir / "fig1_gains.csv");
    os << "s,id,Gamma,gamma_l,delta_tilde\n";
    for (const auto& r : figure1_rows()) {
      os << format_number(r.s) << ',' << format_number(r.id) << ',' << format_number(r.Gamma) << ','
         << format_number(r.gamma_l) << ',' << format_number(r.delta_tilde) << '\n';
    }
    auto mk = open_out(dir / "fig1_markers.csv");
    mk << "name,s\nM_ell," << format_number(constants().M_ell) << "\nM_g,"
       << format_number(constants().M_g) << '\n';
    return {"fig1_gains.csv", "fig1_markers.csv"};
  }
  if (figure != 2) throw ConfigError("unknown figure " + std::to_string(figure));
  const auto& a = artifacts();
  EnsembleOptions eo;
  eo.workers = opts.workers;
  eo.record_every = opts.record_every;
  eo.channels = example_channels();
  eo.keep_trajectories = true;
  std::vector<std::string> files;
  auto run = [&](const char* tag, double radius, double T) {
    ConvergenceTarget target;
    target.tol = radius <= constants().M_ell ? 1e-3 : 1e-2;
    const auto rep = simulate_ensemble(a.problem.system, radius, opts.count, opts.h, T, target, eo);
    const std::string csv = std::string("fig2_") + tag + ".csv";
    const std::string js = std::string("fig2_") + tag + "_summary.json";
    write_ensemble(rep, dir / csv, dir / js);
    files.push_back(csv);
    files.push_back(js);
  };
  if (opts.radius) {
    run("custom", *opts.radius, opts.T_global);
  } else {
    run("local", constants().M_ell, opts.T_local);
    run("global", 5.0, opts.T_global);
  }
  return files;
}

}  // namespace rsg::example
