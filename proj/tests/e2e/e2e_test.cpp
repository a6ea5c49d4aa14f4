#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("RSG_CLI_PATH");
  return p ? p : "rsg";
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + cli() + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("rsg_e2e_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub = "") const {
    const auto d = sub.empty() ? dir_ : dir_ / sub;
    return " --out-dir " + d.string();
  }
  fs::path dir_;
};

std::string data(const std::string& name) { return std::string(RSG_TEST_DATA) + "/" + name; }

TEST_F(Cli, CheckLocalPasses) {
  EXPECT_EQ(run("check --problem example1 --suite local" + out()), 0);
  const auto rep = slurp(dir_ / "check_report.json");
  EXPECT_NE(rep.find("\"passed\": true"), std::string::npos) << rep;
}

TEST_F(Cli, CheckGlobalPasses) {
  EXPECT_EQ(run("check --problem example1 --suite global" + out()), 0);
}

TEST_F(Cli, CheckTheoremOneFailsWithWitness) {
  EXPECT_EQ(run("check --problem example1 --suite global-theorem1" + out()), 1);
  const auto rep = slurp(dir_ / "check_report.json");
  EXPECT_NE(rep.find("\"passed\": false"), std::string::npos);
  EXPECT_NE(rep.find("delta~^-1(Gamma(s))"), std::string::npos) << rep;
}

TEST_F(Cli, CheckMissingProblemIsConfigError) {
  EXPECT_EQ(run("check --problem nonexistent.json" + out()), 2);
}

TEST_F(Cli, CheckUnknownSuiteIsConfigError) {
  EXPECT_EQ(run("check --suite nonsense" + out()), 2);
}

TEST_F(Cli, CheckUserConfigMatchesBuiltin) {
  ASSERT_EQ(run("check --problem " + data("loop_example.json") + " --suite local,global,assumption1" + out("u")), 0);
  ASSERT_EQ(run("check --problem example1 --suite local,global,assumption1" + out("b")), 0);
  auto strip_name = [](std::string s) {
    const auto a = s.find("\"problem\"");
    const auto b = s.find('\n', a);
    return s.erase(a, b - a);
  };
  EXPECT_EQ(strip_name(slurp(dir_ / "u" / "check_report.json")),
            strip_name(slurp(dir_ / "b" / "check_report.json")));
}

TEST_F(Cli, SimulateLocalRadius) {
  EXPECT_EQ(run("simulate --problem example1 --radius 0.236 --count 16" + out()), 0);
  int csv = 0;
  for (const auto& e : fs::directory_iterator(dir_)) csv += e.path().extension() == ".csv";
  EXPECT_EQ(csv, 16);
  EXPECT_TRUE(fs::exists(dir_ / "ensemble_summary.json"));
}

TEST_F(Cli, SimulateGlobalRadius) {
  EXPECT_EQ(run("simulate --problem example1 --radius 5 --count 16 --horizon 500" + out()), 0);
}

TEST_F(Cli, SimulateNegativeRadiusIsConfigError) {
  EXPECT_EQ(run("simulate --radius -1" + out()), 2);
}

TEST_F(Cli, ReproduceFigureOne) {
  ASSERT_EQ(run("reproduce --figure 1" + out()), 0);
  std::ifstream is(dir_ / "fig1_gains.csv");
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 2003);
}

TEST_F(Cli, ReproduceFigureTwo) {
  ASSERT_EQ(run("reproduce --figure 2" + out()), 0);
  int csv = 0;
  for (const auto& e : fs::directory_iterator(dir_)) csv += e.path().extension() == ".csv";
  EXPECT_GE(csv, 2);
}

TEST_F(Cli, ReproduceUnknownFigure) {
  EXPECT_EQ(run("reproduce --figure 3" + out()), 2);
}

TEST_F(Cli, NoSubcommand) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, OutputsAreByteIdentical) {
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run("check --suite local,global,theorem2 --seed 3" + out(sub)), 0);
    ASSERT_EQ(run("simulate --radius 0.5 --count 4 --horizon 20 --tol 10" + out(sub)), 0);
    ASSERT_EQ(run("reproduce --figure 1" + out(sub)), 0);
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    const auto name = e.path().filename();
    ASSERT_TRUE(fs::exists(dir_ / "b" / name)) << name;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / name)) << name;
    ++files;
  }
  EXPECT_GE(files, 7u);
}

TEST_F(Cli, ParallelWorkersMatchSerial) {
  ASSERT_EQ(run("simulate --radius 5 --count 8 --horizon 50 --tol 10 --workers 1" + out("a")), 0);
  ASSERT_EQ(run("simulate --radius 5 --count 8 --horizon 50 --tol 10 --workers 4" + out("b")), 0);
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path();
  }
}

TEST_F(Cli, OutDirFallsBackToEnvironment) {
  EXPECT_EQ(run("reproduce --figure 1", "RSG_OUT_DIR=" + dir_.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "fig1_gains.csv"));
}

TEST_F(Cli, BridgeSpecs) {
  EXPECT_EQ(run("bridge --spec " + data("kinf_bridge.json") + out("k")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "k" / "bridge.json"));
  EXPECT_EQ(run("bridge --spec " + data("smooth_bridge.json") + out("s")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "bridge.json"));
}

TEST_F(Cli, BridgeHypothesisViolation) {
  const auto spec = dir_ / "bad.json";
  std::ofstream(spec) << R"({"schema":1,"kind":"kinf","alpha":{"kind":"affine","slope":"1","intercept":"0"},)"
                      << R"("beta":{"kind":"affine","slope":"1.5","intercept":"0"},"p":"0.1","q":"2"})";
  EXPECT_EQ(run("bridge --spec " + spec.string() + out()), 1);
}

TEST_F(Cli, MalformedConfig) {
  const auto cfg = dir_ / "broken.json";
  std::ofstream(cfg) << "{\"schema\": 1, ";
  EXPECT_EQ(run("check --problem " + cfg.string() + out()), 2);
}

}  // namespace
