#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "rsg/certificates.hpp"

namespace rsg::cli {

struct RunOptions {
  std::optional<std::size_t> grid;
  std::optional<double> s_max;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_dini;
  std::optional<double> radius;
  std::optional<std::size_t> count;
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<double> tol;
  std::optional<double> record_dt;
  std::optional<std::size_t> workers;
  std::optional<bool> threshold_swap;
  std::optional<bool> analytic_dini;
};

struct LoadedProblem {
  Problem problem;
  bool builtin = false;
  std::optional<Gain> theorem1_gain;
  std::optional<Gain> theorem1_delta;  // cross gain when absent
  RunOptions defaults;  // from the config's "options" block
};

// "example1" or a path to a schema-1 JSON config. Throws ConfigError.
LoadedProblem load_problem(const std::string& spec);
LoadedProblem problem_from_json(const Json& j);

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

// Entry point; returns the process exit code (0 pass, 1 failure, 2 config).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rsg::cli
