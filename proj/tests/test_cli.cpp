#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "capkit/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = CAPKIT_CLI_PATH;
const std::string samples = CAPKIT_SAMPLES_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("capkit_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = cli + " " + args + " --out " + out.string() + " > " + (out / "stdout.txt").string() +
                          " 2> " + (out / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string spec(const std::string& name) { return "--spec " + samples + "/" + name + ".json"; }

}  // namespace

TEST(Cli, AnalyzeWritesReports) {
  const auto out = scratch("analyze");
  ASSERT_EQ(run("analyze " + spec("unit_disc") + " --points 0,0.5:0 --t-grid=-2,-1,3", out), 0);
  const auto doc = capkit::io::json::parse(slurp(out / "chain_0.json"));
  EXPECT_EQ(doc["schema"], "capkit.chain/1");
  EXPECT_EQ(doc["report"]["verdict"], "disc-centered-at-z");
  EXPECT_EQ(capkit::io::json::parse(slurp(out / "chain_1.json"))["report"]["verdict"],
            "biholomorphic-to-disc-evidence");
  const std::string csv = slurp(out / "profile_0.csv");
  EXPECT_NE(csv.find("# config_hash: "), std::string::npos);
  EXPECT_NE(csv.find(capkit::io::csv_profile_header), std::string::npos);
}

TEST(Cli, SweepWritesOneRowPerLevelPair) {
  const auto out = scratch("sweep");
  ASSERT_EQ(run("sweep " + spec("ellipse") + " --points 0,0.5:0.2 --t-grid=-3,-0.5,4", out), 0);
  std::istringstream in(slurp(out / "sweep.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line.rfind("point_index", 0) != 0) ++rows;
  EXPECT_EQ(rows, 2 * 3);
}

TEST(Cli, MultidimReports) {
  const auto out = scratch("multidim");
  ASSERT_EQ(run("analyze " + spec("unit_bidisc") + " --points 0/0,0.1/0", out), 0);
  const auto center = capkit::io::json::parse(slurp(out / "multidim_0.json"));
  EXPECT_NEAR(center["indicatrix"]["gap"].get<double>(), capkit::pi * capkit::pi / 2.0, 1e-12);
  const auto off = capkit::io::json::parse(slurp(out / "multidim_1.json"));
  EXPECT_TRUE(off["indicatrix"].is_null());
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto out = scratch("usage");
  std::ofstream(out / "bad.json") << "{\"kind\": \"disc\", ";
  EXPECT_EQ(run("analyze --spec " + (out / "bad.json").string() + " --points 0", out), 2);
  EXPECT_EQ(run("analyze " + spec("unit_disc") + " --points 2:0", out), 2);
  EXPECT_EQ(run("analyze " + spec("unit_disc") + " --points abc", out), 2);
  EXPECT_EQ(run("analyze " + spec("unit_disc") + " --points 0 --t-grid=-1,-2,3", out), 2);
  EXPECT_EQ(run("frobnicate", out), 2);
  EXPECT_EQ(run("analyze --points 0", out), 2);
}

TEST(Cli, SolverFailureExitsThree) {
  const auto out = scratch("solver");
  EXPECT_EQ(run("analyze " + spec("unit_square") + " --points 0.5:0.5 --defect-tol 1e-18", out), 3);
  EXPECT_NE(slurp(out / "stderr.txt").find("SolveFailed"), std::string::npos);
}

TEST(Cli, CoarseValidateNamesFailure) {
  const auto out = scratch("validate_coarse");
  EXPECT_EQ(run("validate --resolution 16", out), 5);
  EXPECT_NE(slurp(out / "stderr.txt").find("first failing invariant"), std::string::npos);
  const auto doc = capkit::io::json::parse(slurp(out / "validate.json"));
  EXPECT_FALSE(doc["pass"].get<bool>());
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto out = scratch("env"), env_dir = scratch("env_target");
  const std::string cmd = "CAPKIT_OUT=" + env_dir.string() + " " + cli + " analyze " + spec("unit_ball_c2") +
                          " --points 0/0 --out " + out.string() + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(env_dir / "multidim_0.json"));
  EXPECT_FALSE(fs::exists(out / "multidim_0.json"));
}

TEST(Cli, VersionFlag) {
  const auto out = scratch("version");
  EXPECT_EQ(run("--version", out), 0);
  EXPECT_NE(slurp(out / "stdout.txt").find("0.1.0"), std::string::npos);
}
