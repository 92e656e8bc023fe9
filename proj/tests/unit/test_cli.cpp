#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcsm/cli.hpp"
#include "qcsm/model.hpp"

using namespace qcsm;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("qcsm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    unsetenv("QCSM_OUT");
    const std::vector<ServiceId> ids{ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation};
    write("good.json", config_to_json(build_scenario(ids, 20, 0)).dump(2));
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string path(const std::string& name) const { return (root_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(root_ / name) << text; }
  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  fs::path root_;
};

}  // namespace

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(run_cli({"validate", "--config", path("good.json")}), kExitOk);
  EXPECT_EQ(run_cli({"validate", "--config", path("missing.json")}), kExitConfig);

  auto doc = json::parse(read(root_ / "good.json"));
  doc["churn_probability"] = 1.5;
  write("churn.json", doc.dump());
  testing::internal::CaptureStderr();
  EXPECT_EQ(run_cli({"validate", "--config", path("churn.json")}), kExitConfig);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("churn_probability"), std::string::npos);

  doc = json::parse(read(root_ / "good.json"));
  doc["services"].push_back(doc["services"][0]);
  write("dup.json", doc.dump());
  testing::internal::CaptureStderr();
  EXPECT_EQ(run_cli({"validate", "--config", path("dup.json")}), kExitConfig);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("services"), std::string::npos);

  write("broken.json", "{not json");
  EXPECT_EQ(run_cli({"validate", "--config", path("broken.json")}), kExitConfig);
}

TEST_F(CliTest, TrainWritesArtifactsDeterministically) {
  const std::vector<std::string> base{"train", "--config", path("good.json"), "--episodes", "300", "--seed", "2"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b")});
  ASSERT_EQ(run_cli(a), kExitOk);
  ASSERT_EQ(run_cli(b), kExitOk);
  for (const char* f : {"qtable.json", "reward_trace.csv", "manifest.json"}) EXPECT_TRUE(fs::exists(root_ / "a" / f)) << f;
  EXPECT_EQ(read(root_ / "a" / "reward_trace.csv"), read(root_ / "b" / "reward_trace.csv"));
  const auto manifest = json::parse(read(root_ / "a" / "manifest.json"));
  EXPECT_TRUE(manifest["complete"].get<bool>());
  EXPECT_EQ(manifest["seeds"], json::array({2}));
  EXPECT_EQ(manifest["config_hash"],
            hex64(config_hash(config_from_json(json::parse(read(root_ / "good.json"))))));
  const std::string trace = read(root_ / "a" / "reward_trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "episode,cumulative_reward,epsilon,lr,seed");
}

TEST_F(CliTest, TrainPreconditions) {
  EXPECT_EQ(run_cli({"train", "--config", path("good.json"), "--episodes", "0", "--out", path("x")}), kExitConfig);
  EXPECT_EQ(run_cli({"train", "--config", path("good.json"), "--lr", "2", "--out", path("x")}), kExitConfig);
  EXPECT_EQ(run_cli({"train", "--out", path("x")}), kExitConfig);
  write("blocker", "file");
  EXPECT_EQ(run_cli({"train", "--config", path("good.json"), "--episodes", "10", "--out", path("blocker") + "/sub"}),
            kExitIo);
}

TEST_F(CliTest, OutEnvironmentVariableOverridesFlag) {
  setenv("QCSM_OUT", path("env_out").c_str(), 1);
  EXPECT_EQ(run_cli({"train", "--config", path("good.json"), "--episodes", "10", "--out", path("flag_out")}), kExitOk);
  unsetenv("QCSM_OUT");
  EXPECT_TRUE(fs::exists(root_ / "env_out" / "manifest.json"));
  EXPECT_FALSE(fs::exists(root_ / "flag_out"));
}

TEST_F(CliTest, ExperimentErrors) {
  EXPECT_EQ(run_cli({"experiment", "--figure", "nope", "--config", path("good.json"), "--out", path("e")}),
            kExitConfig);
  EXPECT_EQ(run_cli({"experiment", "--figure", "response", "--config", path("missing.json"), "--out", path("e")}),
            kExitConfig);
}

TEST_F(CliTest, ResponseExperimentGrid) {
  ASSERT_EQ(run_cli({"experiment", "--figure", "response", "--config", path("good.json"), "--seeds", "0,1", "--out",
                     path("r")}),
            kExitOk);
  const std::string csv = read(root_ / "r" / "fig3_response.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2 * 4);
  const std::string results = read(root_ / "r" / "results.csv");
  EXPECT_EQ(results.substr(0, results.find('\n')), "experiment,method,services,n_sensors,metric,value,ci_low,ci_high,unit,seed_count");
  const auto manifest = json::parse(read(root_ / "r" / "manifest.json"));
  EXPECT_EQ(manifest["artifacts"].size(), 3u);
}

TEST_F(CliTest, RewardExperimentRowsPerWindow) {
  ASSERT_EQ(run_cli({"experiment", "--figure", "reward", "--config", path("good.json"), "--seeds", "0,1",
                     "--episodes", "256", "--out", path("w")}),
            kExitOk);
  const std::string csv = read(root_ / "w" / "fig5_reward.csv");
  // 3 learning rates x 2 seeds x (256 / batch 128) windows
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 2 * 2);
}

TEST_F(CliTest, InterruptedRunLeavesIncompleteManifest) {
  std::atomic<bool> cancel{true};
  EXPECT_EQ(run_cli({"experiment", "--figure", "lifetime", "--config", path("good.json"), "--seeds", "0", "--out",
                     path("i")},
                    &cancel),
            kExitInterrupted);
  const auto manifest = json::parse(read(root_ / "i" / "manifest.json"));
  EXPECT_FALSE(manifest["complete"].get<bool>());
}

TEST_F(CliTest, DumpFleetWritesOneSnapshotPerCycle) {
  ASSERT_EQ(run_cli({"experiment", "--figure", "lifetime", "--config", path("good.json"), "--seeds", "0", "--cycles",
                     "20", "--episodes", "50", "--dump-fleet", "--out", path("f")}),
            kExitOk);
  const std::string dump = read(root_ / "f" / "fleet" / "fleet_QCSM_2svc_s0.ndjson");
  EXPECT_EQ(std::count(dump.begin(), dump.end(), '\n'), 20);
  std::istringstream in(dump);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(json::parse(line)["nodes"].size(), 20u);
}
