#include <gtest/gtest.h>

#include <fstream>

#include "rsg/cli.hpp"
#include "rsg/errors.hpp"

namespace rsg::cli {
namespace {

Json loop_config() {
  std::ifstream is(std::string(RSG_TEST_DATA) + "/loop_example.json");
  return Json::parse(is);
}

TEST(Config, BuiltinProblem) {
  const auto lp = load_problem("example1");
  EXPECT_TRUE(lp.builtin);
  EXPECT_EQ(lp.problem.name, "example1");
  EXPECT_TRUE(lp.defaults.threshold_swap.value_or(false));
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(load_problem("definitely-missing.json"), ConfigError);
}

TEST(Config, UserLoopMirrorsBuiltin) {
  const auto lp = problem_from_json(loop_config());
  const auto ex = load_problem("example1");
  EXPECT_FALSE(lp.builtin);
  EXPECT_EQ(lp.problem.bundle.M_ell, 0.236);
  EXPECT_EQ(lp.problem.bundle.M_g, 0.245);
  for (double s : {0.0, 0.1, 0.2, 0.236, 0.2375, 0.5, 3.0}) {
    EXPECT_EQ(lp.problem.bundle.cross_gain(s), ex.problem.bundle.cross_gain(s)) << s;
    EXPECT_NEAR(lp.problem.bundle.local_gain(s), ex.problem.bundle.local_gain(s), 1e-12 * (1.0 + s)) << s;
  }
  for (double x : {-0.3, 0.0, 0.7}) {
    for (double z : {-2.0, 0.0, 0.4}) {
      EXPECT_EQ(lp.problem.system.f({x}, {z}), ex.problem.system.f({x}, {z}));
      EXPECT_EQ(lp.problem.system.g({x}, {z}), ex.problem.system.g({x}, {z}));
    }
  }
  EXPECT_EQ(lp.defaults.grid.value_or(0), 4000u);
}

TEST(Config, SchemaIsRequired) {
  auto j = loop_config();
  j.erase("schema");
  EXPECT_THROW(problem_from_json(j), ConfigError);
  j["schema"] = 2;
  EXPECT_THROW(problem_from_json(j), ConfigError);
}

TEST(Config, UnknownKeysAreRejected) {
  auto j = loop_config();
  j["bundle"]["M_ell_typo"] = 1;
  EXPECT_THROW(problem_from_json(j), ConfigError);
  auto k = loop_config();
  k["options"]["speed"] = "fast";
  EXPECT_THROW(problem_from_json(k), ConfigError);
  auto m = loop_config();
  m["extra"] = true;
  EXPECT_THROW(problem_from_json(m), ConfigError);
}

TEST(Config, RejectsSystemWithoutEquilibrium) {
  auto j = loop_config();
  j["system"]["drift"]["c"][0] = "0.1";
  EXPECT_THROW(problem_from_json(j), ConfigError);
}

TEST(Config, BuiltinWithOptions) {
  const auto lp = problem_from_json(Json::parse(R"({"schema":"1","problem":"example1","options":{"seed":"7","radius":"0.5"}})"));
  EXPECT_TRUE(lp.builtin);
  EXPECT_EQ(lp.defaults.seed.value_or(0), 7u);
  EXPECT_EQ(lp.defaults.radius.value_or(0.0), 0.5);
  EXPECT_THROW(problem_from_json(Json::parse(R"({"schema":1,"problem":"example2"})")), ConfigError);
  EXPECT_THROW(problem_from_json(Json::parse(R"({"schema":1,"problem":"example1","options":{"count":-1}})")),
               ConfigError);
}

TEST(Config, OutDirFallsBackToEnvironment) {
  EXPECT_EQ(resolve_out_dir(std::string("flag")), "flag");
  ::setenv("RSG_OUT_DIR", "/tmp/rsg-env", 1);
  EXPECT_EQ(resolve_out_dir(std::nullopt), "/tmp/rsg-env");
  ::unsetenv("RSG_OUT_DIR");
  EXPECT_EQ(resolve_out_dir(std::nullopt), ".");
}

}  // namespace
}  // namespace rsg::cli
