// Copyright 2026 The mdtrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sys/wait.h>
#include <string>
#include <vector>

#include "cli.h"
#include "mdtrack/config.h"
#include "mdtrack/model.h"
#include "mdtrack/param_store.h"
#include "mdtrack/sequence_io.h"

namespace mdtrack {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("mdtrack_cli_" +
             std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "mdtrack");
    return cli::run(args);
  }

  // The only run directory under `parent` whose name starts with `command-`.
  fs::path run_dir(const fs::path& parent, const std::string& command) {
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(parent)) {
      if (e.path().filename().string().starts_with(command + "-")) found.push_back(e.path());
    }
    EXPECT_EQ(found.size(), 1u) << command;
    return found.empty() ? fs::path{} : found.front();
  }

  std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  }

  void gen(const fs::path& dest, const std::string& count = "2") {
    ASSERT_EQ(run({"gen", "-n", count, "--dest", dest.string(), "-s", "scene.frames=5", "-s",
                   "seed=4"}),
              cli::kExitOk);
  }

  fs::path root_;
};

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"fly"}), cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--bogus-flag"}), cli::kExitUsage);
  EXPECT_EQ(run({"gen", "-s", "no_such_key=1", "--dest", root_.string()}), cli::kExitUsage);
  EXPECT_EQ(run({"gen", "-s", "missing_equals", "--dest", root_.string()}), cli::kExitUsage);
  EXPECT_EQ(run({"train", "--preset", "full-2x", "--out-dir", root_.string()}),
            cli::kExitUsage);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
  EXPECT_EQ(run({"--schema"}), cli::kExitOk);
}

TEST_F(Cli, GenWritesReadableDeterministicSequences) {
  gen(root_ / "a");
  gen(root_ / "b");
  SequenceMeta meta;
  const LabeledSequence seq = read_sequence(root_ / "a" / "seq_0001", &meta);
  EXPECT_EQ(seq.size(), 5u);
  EXPECT_FALSE(meta.config.empty());
  EXPECT_EQ(read(root_ / "a" / "seq_0001" / "frames" / "000003.bin"),
            read(root_ / "b" / "seq_0001" / "frames" / "000003.bin"));
  EXPECT_EQ(read(root_ / "a" / "seq_0000" / "labels.jsonl"),
            read(root_ / "b" / "seq_0000" / "labels.jsonl"));
  EXPECT_TRUE(fs::exists(root_ / "a" / "config.txt"));
}

const std::vector<std::string> kTinyTrain = {
    "--preset", "tiny", "-s", "train_sequences=2", "-s", "scene.frames=4",
    "-s",       "epochs=2", "-s", "val_sequences=1", "-s", "val_frames=4"};

TEST_F(Cli, TrainWithZeroLearningRateKeepsInitialWeights) {
  std::vector<std::string> args{"train", "--out-dir", root_.string(), "-s", "lr=0"};
  args.insert(args.end(), kTinyTrain.begin(), kTinyTrain.end());
  ASSERT_EQ(run(args), cli::kExitOk);
  const fs::path dir = run_dir(root_, "train");
  const ParamStore init = ParamStore::load(dir / "init.ckpt");
  const ParamStore trained = ParamStore::load(dir / "model.ckpt");
  EXPECT_TRUE(trained.same_values(init));
  const RunConfig cfg = make_run_config(read_key_values(dir / "config.txt"));
  EXPECT_TRUE(TrackerModel(cfg.model, cfg.seed).params().same_values(trained));
  for (const char* f : {"train_log.csv", "summary.csv", "config.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_NE(read(dir / "train_log.csv").find("alpha0"), std::string::npos);
}

TEST_F(Cli, EchoedConfigReproducesTheCheckpoint) {
  std::vector<std::string> args{"train", "--out-dir", (root_ / "a").string(), "--no-dwc"};
  args.insert(args.end(), kTinyTrain.begin(), kTinyTrain.end());
  ASSERT_EQ(run(args), cli::kExitOk);
  const fs::path a = run_dir(root_ / "a", "train");
  EXPECT_NE(read(a / "config.txt").find("dwc = false"), std::string::npos);
  ASSERT_EQ(run({"train", "--config", (a / "config.txt").string(), "--out-dir",
                 (root_ / "b").string()}),
            cli::kExitOk);
  const fs::path b = run_dir(root_ / "b", "train");
  EXPECT_EQ(read(a / "model.ckpt"), read(b / "model.ckpt"));
  EXPECT_EQ(read(a / "train_log.csv"), read(b / "train_log.csv"));
}

TEST_F(Cli, OracleTrackThenEvalScoresOne) {
  gen(root_ / "data");
  const std::string s0 = (root_ / "data" / "seq_0000").string();
  const std::string s1 = (root_ / "data" / "seq_0001").string();
  ASSERT_EQ(run({"track", "--oracle", "--out-dir", root_.string(), s0, s1}), cli::kExitOk);
  const fs::path tracks = run_dir(root_, "track");
  EXPECT_TRUE(fs::exists(tracks / "seq_0000.txt"));
  ASSERT_EQ(run({"eval", "--tracks", tracks.string(), "--out-dir", root_.string(), s0, s1}),
            cli::kExitOk);
  const std::string csv = read(run_dir(root_, "eval") / "eval.csv");
  EXPECT_NE(csv.find("summary,,,,1,1\n"), std::string::npos) << csv;
  // 4 scored frames per sequence plus header and summary.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST_F(Cli, TrackWithCheckpointAndMismatchedConfig) {
  gen(root_ / "data", "1");
  const std::string seq = (root_ / "data" / "seq_0000").string();
  std::vector<std::string> args{"train", "--out-dir", root_.string(), "-s", "max_steps=1"};
  args.insert(args.end(), kTinyTrain.begin(), kTinyTrain.end());
  ASSERT_EQ(run(args), cli::kExitOk);
  const fs::path train = run_dir(root_, "train");
  const fs::path out = root_ / "tracks";
  EXPECT_EQ(run({"track", "--config", (train / "config.txt").string(), "--checkpoint",
                 (train / "model.ckpt").string(), "--out-dir", out.string(), seq}),
            cli::kExitOk);
  EXPECT_TRUE(fs::exists(run_dir(out, "track") / "seq_0000.jsonl"));
  EXPECT_EQ(run({"track", "--checkpoint", (train / "model.ckpt").string(), "--out-dir",
                 out.string(), seq}),
            cli::kExitData);
  EXPECT_EQ(run({"track", "--out-dir", out.string(), seq}), cli::kExitUsage);
}

TEST_F(Cli, DataErrorsExitTwo) {
  gen(root_ / "data", "1");
  const fs::path seq = root_ / "data" / "seq_0000";
  EXPECT_EQ(run({"eval", "--tracks", (root_ / "none").string(), "--out-dir", root_.string(),
                 seq.string()}),
            cli::kExitData);
  fs::resize_file(seq / "frames" / "000002.bin", 13);
  EXPECT_EQ(run({"track", "--oracle", "--out-dir", root_.string(), seq.string()}),
            cli::kExitData);
  EXPECT_EQ(run({"train", "--data", (root_ / "empty").string(), "--out-dir", root_.string()}),
            cli::kExitData);
}

TEST_F(Cli, NumericFailureExitsThree) {
  std::vector<std::string> args{"train", "--out-dir", root_.string(), "-s", "lr=1e300", "-s",
                                "augment=false"};
  args.insert(args.end(), kTinyTrain.begin(), kTinyTrain.end());
  EXPECT_EQ(run(args), cli::kExitNumeric);
}

TEST_F(Cli, BenchWritesCsvAndReport) {
  ASSERT_EQ(run({"bench", "--n", "32,64,128,256", "--d", "8", "--repeats", "1", "--out-dir",
                 root_.string()}),
            cli::kExitOk);
  const fs::path dir = run_dir(root_, "bench");
  const std::string csv = read(dir / "bench.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const std::string report = read(dir / "scaling.txt");
  EXPECT_EQ(report.find("FAIL"), std::string::npos) << report;
  EXPECT_EQ(run({"bench", "--n", "32,64,128", "--out-dir", root_.string()}), cli::kExitUsage);
}

TEST_F(Cli, GradcheckReportsAndFailsOnImpossibleTolerance) {
  EXPECT_EQ(run({"gradcheck", "--preset", "tiny", "--entries", "1", "--out-dir",
                 (root_ / "a").string()}),
            cli::kExitOk);
  EXPECT_NE(read(run_dir(root_ / "a", "gradcheck") / "gradcheck.csv").find("head.xy.w"),
            std::string::npos);
  EXPECT_EQ(run({"gradcheck", "--preset", "tiny", "--entries", "1", "--tol", "0", "--out-dir",
                 (root_ / "b").string()}),
            cli::kExitNumeric);
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = MDTRACK_BIN_PATH;
  const std::string quiet = " >/dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system((bin + quiet).c_str())), 1);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " --help" + quiet).c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system(
                (bin + " eval --tracks /nonexistent /nonexistent" + quiet).c_str())),
            2);
}

}  // namespace
}  // namespace mdtrack
