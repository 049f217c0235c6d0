// Copyright 2026 The Stitchkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "stitchkit/cli/cli.h"
#include "stitchkit/io/checkpoint.h"
#include "stitchkit/io/experiment.h"

namespace stitchkit::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stitchkit_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Invoke(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::Run(args, out_, err_);
  }

  void WriteFile(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
  }

  fs::path OnlyRun(const fs::path& root) {
    std::vector<fs::path> runs;
    for (const auto& e : fs::directory_iterator(root)) runs.push_back(e.path());
    EXPECT_EQ(runs.size(), 1u);
    return runs.empty() ? fs::path() : runs.front();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, HelpSucceeds) {
  EXPECT_EQ(Invoke({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("analyze-regression"), std::string::npos);
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
  EXPECT_EQ(Invoke({}), kExitInput);
  EXPECT_EQ(Invoke({"eval", "--env", "reach-r2"}), kExitInput);
  EXPECT_EQ(Invoke({"frobnicate"}), kExitInput);
}

TEST_F(CliTest, SmokeTrainWritesCheckpointAndMetrics) {
  const fs::path root = dir_ / "runs";
  ASSERT_EQ(Invoke({"--preset", "smoke", "--seed", "4", "--out", root.string(), "train"}),
            kExitOk)
      << err_.str();
  const fs::path run = OnlyRun(root);
  EXPECT_TRUE(fs::exists(run / "config.yaml"));
  const io::Checkpoint c = io::LoadCheckpoint(run / "checkpoint.skc");
  EXPECT_EQ(c.metadata["epoch"], 2);
  EXPECT_EQ(c.metadata["seed"], 4);
  EXPECT_EQ(io::MetricsLog::Read(run / "metrics.jsonl").size(), 2u);
}

TEST_F(CliTest, InvalidConfigLeavesNoArtifacts) {
  WriteFile(dir_ / "bad.yaml", "schema_version: 1\nenv: reach-r2\nsac:\n  gama: 0.9\n");
  const fs::path root = dir_ / "runs";
  EXPECT_EQ(Invoke({"--config", (dir_ / "bad.yaml").string(), "--out", root.string(), "train"}),
            kExitInput);
  EXPECT_NE(err_.str().find("sac.gama"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(root));

  WriteFile(dir_ / "ps.yaml",
            "schema_version: 1\nenv: reach-r2\narchitecture:\n  method: ps\n");
  EXPECT_EQ(Invoke({"--config", (dir_ / "ps.yaml").string(), "--out", root.string(), "train"}),
            kExitInput);
  EXPECT_FALSE(fs::exists(root));
}

TEST_F(CliTest, MissingCheckpointIsInputError) {
  EXPECT_EQ(Invoke({"eval", "--checkpoint", (dir_ / "none.skc").string(), "--env", "reach-r2"}),
            kExitInput);
}

TEST_F(CliTest, ModularPipelineAndIncompatibleStitch) {
  const fs::path root = dir_ / "runs";
  ASSERT_EQ(Invoke({"--preset", "smoke", "--seed", "1", "--out", root.string(), "train"}), kExitOk);
  const fs::path plain = OnlyRun(root) / "checkpoint.skc";

  const fs::path anchors = dir_ / "anchors.ska";
  ASSERT_EQ(Invoke({"--seed", "2", "--out", anchors.string(), "collect-anchors", "--checkpoint",
                    plain.string(), "--env", "reach-r2", "-k", "3", "--episodes", "30"}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("hash: "), std::string::npos);

  const std::string body =
      "architecture:\n  method: ps\n  size: small\n"
      "sac:\n  batch_size: 16\n"
      "training:\n  epochs: 1\n  cycles_per_epoch: 1\n  episodes_per_cycle: 1\n"
      "  updates_per_cycle: 2\n  eval_episodes: 2\n"
      "paths:\n  anchors: anchors.ska\n";
  WriteFile(dir_ / "r2.yaml", "schema_version: 1\nenv: reach-r2\n" + body);
  WriteFile(dir_ / "r3.yaml", "schema_version: 1\nenv: reach-r3\n" + body);
  const fs::path ps_root = dir_ / "ps";
  ASSERT_EQ(Invoke({"--config", (dir_ / "r2.yaml").string(), "--out", (ps_root / "a").string(),
                    "train"}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(Invoke({"--config", (dir_ / "r3.yaml").string(), "--out", (ps_root / "b").string(),
                    "train"}),
            kExitOk)
      << err_.str();
  const fs::path a = OnlyRun(ps_root / "a") / "checkpoint.skc";
  const fs::path b = OnlyRun(ps_root / "b") / "checkpoint.skc";

  const fs::path stitched = dir_ / "stitched.skc";
  ASSERT_EQ(Invoke({"--out", stitched.string(), "stitch", "--task", a.string(), "--robot",
                    b.string(), "--env", "reach-r3"}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(io::LoadCheckpoint(stitched).metadata["stitched"], true);

  EXPECT_EQ(Invoke({"--out", (dir_ / "x.skc").string(), "stitch", "--task", a.string(), "--robot",
                    plain.string(), "--env", "reach-r2"}),
            kExitIncompatible);
  EXPECT_FALSE(fs::exists(dir_ / "x.skc"));
  // Robot module for three joints cannot drive the two-joint arm.
  EXPECT_EQ(Invoke({"--out", (dir_ / "y.skc").string(), "stitch", "--task", a.string(), "--robot",
                    b.string(), "--env", "reach-r2"}),
            kExitIncompatible);

  const fs::path eval_dir = dir_ / "eval";
  fs::create_directories(eval_dir);
  ASSERT_EQ(Invoke({"--out", eval_dir.string(), "eval", "--checkpoint", stitched.string(), "--env",
                    "reach-r3", "--episodes", "4", "--repeats", "2"}),
            kExitOk);
  EXPECT_TRUE(fs::exists(eval_dir / "eval.json"));

  const fs::path latent_dir = dir_ / "latent";
  fs::create_directories(latent_dir);
  ASSERT_EQ(Invoke({"--out", latent_dir.string(), "analyze-latent", "--checkpoint",
                    stitched.string(), "--env", "reach-r3", "--states", "100"}),
            kExitOk)
      << err_.str();
  std::ifstream csv(latent_dir / "latents.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "index,label,task_0,task_1,latent_0,latent_1,latent_2,pc_0,pc_1");

  ASSERT_EQ(Invoke({"analyze-pairwise", "--checkpoint", a.string(), "--checkpoint", b.string(),
                    "--env", "reach-r2", "--states", "50"}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("mean_cosine_distance"), std::string::npos);
  EXPECT_EQ(Invoke({"analyze-pairwise", "--checkpoint", a.string(), "--checkpoint", b.string(),
                    "--env", "reach-r2", "--stage", "middle"}),
            kExitInput);

  const fs::path ft = dir_ / "ft";
  ASSERT_EQ(Invoke({"--out", ft.string(), "--preset", "smoke", "finetune", "--checkpoint",
                    stitched.string(), "--env", "reach-r3", "--epochs", "1", "--warmfill", "0"}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(io::LoadCheckpoint(ft / "checkpoint.skc").metadata["finetuned_epochs"], 1);
}

}  // namespace
}  // namespace stitchkit::cli
