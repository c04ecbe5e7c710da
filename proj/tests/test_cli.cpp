#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string output;  // stdout and stderr together
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(NULLCOLLAPSE_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nullcollapse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  fs::path out(const std::string& sub) const { return dir_ / sub; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DefaultVerifyPasses) {
  const CliRun r = run_cli("--out " + out("v").string() + " verify");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto report = nlohmann::json::parse(slurp(out("v") / "verify_report.json"));
  EXPECT_TRUE(report["passed"].get<bool>());
  for (const auto& c : report["checks"]) EXPECT_LT(c["max_deviation"].get<double>(), 1e-10) << c["name"];
  EXPECT_GT(std::abs(report["interference_witnesses"][0]["I2_mu_q"].get<double>()), 1e-3);
}

TEST_F(Cli, CouplingOutOfRangeNamesTheField) {
  const auto cfg = write_config("bad.json", R"({"coupling": 1.5})");
  const CliRun r = run_cli("--config " + cfg.string() + " verify");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("coupling"), std::string::npos) << r.output;
}

TEST_F(Cli, MalformedOrUnknownConfigIsRejected) {
  EXPECT_EQ(run_cli("--config " + write_config("a.json", "{ nope").string() + " verify").code, 2);
  const CliRun r = run_cli("--config " + write_config("b.json", R"({"colour": 1})").string() + " verify");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("colour"), std::string::npos);
  const CliRun l = run_cli("--config " + write_config("c.json", R"({"labelling": [1, 3, 2, 4]})").string() + " verify");
  EXPECT_EQ(l.code, 2);
  EXPECT_NE(l.output.find("labelling"), std::string::npos);
  EXPECT_EQ(run_cli("table --extent 9").code, 2);
}

TEST_F(Cli, TinyToleranceReportsHonestFailures) {
  const CliRun r = run_cli("--tolerance 1e-20 --out " + out("t").string() + " verify");
  EXPECT_EQ(r.code, 1);
  const auto report = nlohmann::json::parse(slurp(out("t") / "verify_report.json"));
  EXPECT_FALSE(report["passed"].get<bool>());
  int failed = 0;
  for (const auto& c : report["checks"]) {
    EXPECT_EQ(c["tolerance"].get<double>(), 1e-20);
    if (!c["passed"].get<bool>()) {
      ++failed;
      EXPECT_GE(c["max_deviation"].get<double>(), 1e-20);
    }
  }
  EXPECT_GT(failed, 0);
}

TEST_F(Cli, QuantumTableOnSmallestLattice) {
  const auto cfg = write_config("q.json", R"({"lattice": {"width": 1, "depth": 2}, "initial_state": {"amplitudes": [[0.5, 0], [0.5, 0], [0.5, 0], [0, 0.5]]}})");
  const CliRun r = run_cli("--config " + cfg.string() + " --out " + out("q").string() + " table --functional q --extent 1");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto t = nlohmann::json::parse(slurp(out("q") / "table_q_n1.json"));
  ASSERT_EQ(t["re"].size(), 4u);
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_EQ(t["re"][i].size(), 4u);
    for (std::size_t j = 0; j < 4; ++j) {
      total += t["re"][i][j].get<double>();
      EXPECT_NEAR(t["re"][i][j].get<double>(), t["re"][j][i].get<double>(), 1e-12);
      EXPECT_NEAR(t["im"][i][j].get<double>(), -t["im"][j][i].get<double>(), 1e-12);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  const std::string csv = slurp(out("q") / "table_q_n1.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "row,re_00,im_00,re_10,im_10,re_01,im_01,re_11,im_11");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(Cli, CollapseTableIsDiagonal) {
  ASSERT_EQ(run_cli("--out " + out("c").string() + " table --functional c --extent 2").code, 0);
  const auto t = nlohmann::json::parse(slurp(out("c") / "table_c_n2.json"));
  for (std::size_t i = 0; i < t["re"].size(); ++i)
    for (std::size_t j = 0; j < t["re"].size(); ++j)
      if (i != j) {
        EXPECT_EQ(t["re"][i][j].get<double>(), 0.0);
        EXPECT_EQ(t["im"][i][j].get<double>(), 0.0);
      }
}

TEST_F(Cli, DecoheredTableAtFullCouplingMatchesQuantum) {
  const auto cfg = write_config("x1.json", R"({"coupling": 1.0})");
  const std::string base = "--config " + cfg.string() + " --out " + out("x").string() + " table --extent 2 --functional ";
  ASSERT_EQ(run_cli(base + "q").code, 0);
  ASSERT_EQ(run_cli(base + "qtilde").code, 0);
  EXPECT_EQ(slurp(out("x") / "table_q_n2.csv"), slurp(out("x") / "table_qtilde_n2.csv"));
  auto jq = nlohmann::json::parse(slurp(out("x") / "table_q_n2.json"));
  auto jt = nlohmann::json::parse(slurp(out("x") / "table_qtilde_n2.json"));
  jq.erase("functional");
  jt.erase("functional");
  EXPECT_EQ(jq.dump(), jt.dump());
}

TEST_F(Cli, JointTableMemoryGuard) {
  const CliRun r = run_cli("--out " + out("g").string() + " table --functional qe --extent 3");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("exceeds"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(out("g") / "table_qe_n3.csv"));
}

TEST_F(Cli, SampleWithZeroCountWritesOnlyExactMeasure) {
  ASSERT_EQ(run_cli("--out " + out("z").string() + " sample --count 0").code, 0);
  EXPECT_EQ(slurp(out("z") / "trajectories.jsonl"), "");
  const std::string csv = slurp(out("z") / "frequencies.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "config,mu_c");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
}

TEST_F(Cli, SampleIsByteIdenticalForFixedSeed) {
  ASSERT_EQ(run_cli("--out " + out("a").string() + " sample --count 10 --seed 5").code, 0);
  ASSERT_EQ(run_cli("--out " + out("b").string() + " sample --count 10 --seed 5").code, 0);
  for (const char* f : {"trajectories.jsonl", "frequencies.csv"}) EXPECT_EQ(slurp(out("a") / f), slurp(out("b") / f)) << f;
  const std::string jsonl = slurp(out("a") / "trajectories.jsonl");
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 10);
  ASSERT_EQ(run_cli("--out " + out("c").string() + " sample --count 10 --seed 6").code, 0);
  EXPECT_NE(jsonl, slurp(out("c") / "trajectories.jsonl"));
}

TEST_F(Cli, ExampleConfigRuns) {
  const fs::path cfg = fs::path(NULLCOLLAPSE_SOURCE_DIR) / "configs" / "default.json";
  ASSERT_TRUE(fs::exists(cfg));
  EXPECT_EQ(run_cli("--config " + cfg.string() + " --out " + out("d").string() + " verify").code, 0);
}
