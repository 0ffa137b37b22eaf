#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "skyway/experiment.hpp"
#include "skyway/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + SKYWAY_CLI_PATH + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("skyway_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SkylineOfReferenceTable) {
  auto r = run("skyline --catalog " SKYWAY_DATA_DIR "/table1_catalog.json");
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char* name : {"DaaS_2", "DaaS_3", "DaaS_6", "DaaS_7", "DaaS_8", "DaaS_11", "DaaS_12"}) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
}

TEST_F(Cli, PlanAndSimulate) {
  auto p = run("plan --scenario " SKYWAY_DATA_DIR "/scenario_12.json --algo lookahead --depth 1");
  EXPECT_EQ(p.code, 0) << p.out;
  auto b = run("plan --scenario " SKYWAY_DATA_DIR "/scenario_12.json --algo bruteforce");
  EXPECT_EQ(b.code, 0) << b.out;
  auto s = run("simulate --scenario " SKYWAY_DATA_DIR "/scenario_12.json --failure-rate 0.3 --seed 4");
  EXPECT_EQ(s.code, 0) << s.out;
}

TEST_F(Cli, BruteForceTooLargeExitsThree) {
  ASSERT_EQ(run("generate --nodes 20 --seed 2 --out " + path("s20.json")).code, 0);
  auto r = run("plan --scenario " + path("s20.json") + " --algo bruteforce");
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST_F(Cli, InvalidConfigExitsTwo) {
  skyway::write_text(path("bad.json"), R"({"node_counts": [10], "failure_rates": [0.9], "algorithms": ["greedy"]})");
  EXPECT_EQ(run("experiment --config " + path("bad.json") + " --out " + path("x.csv")).code, 2);
  EXPECT_EQ(run("generate --nodes 3 --out " + path("g.json")).code, 2);
  EXPECT_EQ(run("plan --scenario " + path("bad.json")).code, 2);
  EXPECT_EQ(run("plan --scenario " + path("missing.json")).code, 1);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, ExperimentWritesCsv) {
  skyway::write_text(path("cfg.json"), R"({"seed": 2, "node_counts": [10], "failure_rates": [0.0, 0.2],
    "algorithms": ["lookahead", "greedy"], "runs_per_point": 2, "timing": "off"})");
  auto r = run("experiment --config " + path("cfg.json") + " --out " + path("a.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto text = skyway::read_text(path("a.csv"));
  EXPECT_EQ(text.rfind("algorithm,node_count,failure_rate,", 0), 0u);
  EXPECT_EQ(skyway::parse_metrics_csv(text).size(), 4u);
}

TEST_F(Cli, SeedFlagBeatsEnvironment) {
  ASSERT_EQ(run("generate --nodes 10 --seed 5 --out " + path("flag5.json")).code, 0);
  ASSERT_EQ(run("generate --nodes 10 --out " + path("env5.json"), "SKYWAY_SEED=5").code, 0);
  ASSERT_EQ(run("generate --nodes 10 --seed 6 --out " + path("both.json"), "SKYWAY_SEED=5").code, 0);
  auto flag5 = skyway::read_text(path("flag5.json"));
  EXPECT_EQ(skyway::read_text(path("env5.json")), flag5);
  EXPECT_NE(skyway::read_text(path("both.json")), flag5);
  EXPECT_EQ(run("generate --nodes 10 --out " + path("junk.json"), "SKYWAY_SEED=abc").code, 2);
}

TEST_F(Cli, ReportsKernel) {
  auto r = run("isa");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.find("scalar") != std::string::npos || r.out.find("avx2") != std::string::npos);
}
