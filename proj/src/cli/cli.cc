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

#include "stitchkit/cli/cli.h"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "stitchkit/analysis/analysis.h"
#include "stitchkit/anchors/corpus.h"
#include "stitchkit/anchors/select.h"
#include "stitchkit/envs/presets.h"
#include "stitchkit/envs/rollout.h"
#include "stitchkit/errors.h"
#include "stitchkit/io/checkpoint.h"
#include "stitchkit/io/experiment.h"
#include "stitchkit/io/run_config.h"
#include "stitchkit/stitch/stitch.h"
#include "stitchkit/util/file_io.h"

namespace stitchkit::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config;
  std::string preset;
  std::optional<uint64_t> seed;
  std::string out;
};

io::RunConfig ResolveConfig(const Globals& g) {
  if (!g.config.empty() && !g.preset.empty()) {
    throw ConfigError("--config and --preset are mutually exclusive");
  }
  io::RunConfig c;
  if (!g.config.empty()) {
    c = io::LoadRunConfig(g.config);
  } else if (!g.preset.empty()) {
    c = io::PresetRunConfig(g.preset);
  }
  if (g.seed) c.seed = *g.seed;
  return c;
}

uint64_t SeedOr(const Globals& g, uint64_t fallback) { return g.seed ? *g.seed : fallback; }

fs::path RequireOut(const Globals& g) {
  if (g.out.empty()) throw ConfigError("--out is required");
  return g.out;
}

io::Checkpoint Load(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("checkpoint " + path + " does not exist");
  return io::LoadCheckpoint(path);
}

envs::BatchPolicy Greedy(const policy::Actor& actor) {
  return [&actor](const Eigen::MatrixXd& t, const Eigen::MatrixXd& r) {
    return actor.DeterministicAction(t, r);
  };
}

void CheckEnvFits(const policy::Actor& actor, const envs::EnvSpec& env) {
  const policy::NetworkSpec& s = actor.network().spec();
  if (s.task_dim != envs::TaskStateDim(env.task.kind) || s.extra_dim != env.robot.n_joints()) {
    throw ShapeError("policy does not fit the state widths of " + env.id);
  }
}

int Train(const Globals& g, std::ostream& out) {
  const io::RunConfig config = ResolveConfig(g);
  if (g.config.empty() && g.preset.empty()) throw ConfigError("train needs --config or --preset");
  config.Validate();
  const envs::EnvSpec env = envs::ParseEnvId(config.env_id);
  const fs::path root = g.out.empty() ? fs::path("runs") : fs::path(g.out);

  std::shared_ptr<const policy::AnchorSet> anchors;
  if (!config.anchors.empty()) {
    anchors = std::make_shared<policy::AnchorSet>(anchors::LoadAnchorSet(config.anchors));
  }
  const int n = env.robot.n_joints();
  const policy::Dims dims{envs::TaskStateDim(env.task.kind), n, n};
  std::optional<rl::SacAgent> agent;
  if (!config.init_checkpoint.empty()) {
    io::Checkpoint init = io::LoadCheckpoint(config.init_checkpoint);
    CheckEnvFits(init.actor, env);
    agent.emplace(io::ToAgent(init, config.sac, config.seed));
  } else {
    agent.emplace(rl::SacAgent::Create(config.architecture, dims, anchors, config.sac, config.seed));
  }

  io::ExperimentDir dir(root, config);
  io::MetricsLog log(dir.metrics());
  nlohmann::json meta = {{"env_id", config.env_id},
                         {"seed", config.seed},
                         {"method", policy::MethodName(config.architecture.method)},
                         {"size", policy::SizeName(config.architecture.size)},
                         {"config_hash", config.Hash()},
                         {"epoch", 0}};
  io::SaveCheckpoint(dir.checkpoint(), io::FromAgent(*agent, meta));
  rl::TrainConfig training = config.training;
  training.eval_threads = envs::EvalThreads();
  rl::Train(*agent, env, training, config.seed,
            [&](const rl::EpochMetrics& m, const rl::SacAgent& a) {
              log.Append(m.ToJson());
              meta["epoch"] = m.epoch;
              io::SaveCheckpoint(dir.checkpoint(), io::FromAgent(a, meta));
              out << "epoch " << m.epoch << " success " << m.success_rate << " touching "
                  << m.touching_rate << "\n";
            });
  out << "run directory: " << dir.path().string() << "\n";
  return kExitOk;
}

int CollectAnchors(const Globals& g, const std::vector<std::string>& checkpoints,
                   const std::vector<std::string>& env_ids, int k, int episodes,
                   std::ostream& out) {
  if (checkpoints.empty() || checkpoints.size() != env_ids.size()) {
    throw ConfigError("give one --env per --checkpoint");
  }
  const fs::path path = RequireOut(g);
  const uint64_t seed = SeedOr(g, 0);
  std::vector<io::Checkpoint> policies;
  std::vector<envs::EnvSpec> envs_list;
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    policies.push_back(Load(checkpoints[i]));
    envs_list.push_back(envs::ParseEnvId(env_ids[i]));
    CheckEnvFits(policies.back().actor, envs_list.back());
  }
  std::vector<anchors::StateCorpus> parts;
  for (size_t i = 0; i < policies.size(); ++i) {
    parts.push_back(anchors::CollectStates(Greedy(policies[i].actor), envs_list[i], episodes,
                                           MixSeed(seed, i), env_ids[i] + "#" + std::to_string(i)));
  }
  const anchors::StateCorpus corpus = anchors::Merge(parts);
  const policy::AnchorSet set = anchors::BuildAnchorSet(corpus, k, seed);
  anchors::SaveAnchorSet(path, set);
  out << "anchors: " << set.k() << " x " << set.dim() << "\nhash: " << set.hash() << "\n";
  return kExitOk;
}

int StitchCmd(const Globals& g, const std::string& task, const std::string& robot,
              const std::string& env_id, std::ostream& out) {
  const fs::path path = RequireOut(g);
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  const io::Checkpoint t = Load(task);
  const io::Checkpoint r = Load(robot);
  io::Checkpoint s = stitch::Stitch(t, r, env);
  io::SaveCheckpoint(path, s);
  out << "stitched checkpoint: " << path.string() << "\n"
      << "task parent: " << s.metadata["task_parent"].get<std::string>() << "\n"
      << "robot parent: " << s.metadata["robot_parent"].get<std::string>() << "\n";
  return kExitOk;
}

int Eval(const Globals& g, const std::string& checkpoint, const std::string& env_id,
         int episodes, int repeats, std::ostream& out) {
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  const io::Checkpoint c = Load(checkpoint);
  CheckEnvFits(c.actor, env);
  const stitch::MetricTable table =
      stitch::ZeroShotEval(c.actor, env, episodes, repeats, SeedOr(g, 0), envs::EvalThreads());
  out << table.ToText();
  if (!g.out.empty()) {
    WriteFileAtomic(fs::path(g.out) / "eval.json", table.ToJson().dump(2) + "\n");
    WriteFileAtomic(fs::path(g.out) / "eval.txt", table.ToText());
  }
  return kExitOk;
}

int Finetune(const Globals& g, const std::string& checkpoint, const std::string& env_id,
             int epochs, int warmfill, std::ostream& out) {
  const fs::path dir = RequireOut(g);
  io::RunConfig config = ResolveConfig(g);
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  const io::Checkpoint c = Load(checkpoint);
  CheckEnvFits(c.actor, env);
  rl::TrainConfig training = config.training;
  if (epochs >= 0) training.epochs = epochs;
  if (warmfill >= 0) training.warmfill_epochs = warmfill;
  training.eval_threads = envs::EvalThreads();
  io::MetricsLog log(dir / "metrics.jsonl");
  stitch::FinetuneResult r = stitch::FewShotFinetune(
      c, env, config.sac, training, config.seed,
      [&](const rl::EpochMetrics& m, const rl::SacAgent& a) {
        log.Append(m.ToJson());
        nlohmann::json meta = c.metadata;
        meta["finetuned_epochs"] = m.epoch;
        io::SaveCheckpoint(dir / "checkpoint.skc", io::FromAgent(a, meta));
        out << "epoch " << m.epoch << " success " << m.success_rate << "\n";
      });
  io::SaveCheckpoint(dir / "checkpoint.skc", r.checkpoint);
  if (r.metrics.empty()) WriteFileAtomic(dir / "metrics.jsonl", std::string());
  out << "fine-tuned checkpoint: " << (dir / "checkpoint.skc").string() << "\n";
  return kExitOk;
}

int AnalyzeLatent(const Globals& g, const std::string& checkpoint, const std::string& env_id,
                  int states, std::ostream& out) {
  const fs::path dir = RequireOut(g);
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  const io::Checkpoint c = Load(checkpoint);
  CheckEnvFits(c.actor, env);
  const analysis::LatentDump dump = analysis::CollectLatents(c.actor, env, states, SeedOr(g, 0));
  const analysis::PcaResult pca = analysis::PcaProject(dump.latents, 2);
  WriteFileAtomic(dir / "latents.csv", analysis::LatentCsv(dump, &pca.projection));
  std::ostringstream summary;
  summary << "states: " << dump.size() << "\nlatent_dim: " << dump.latents.rows()
          << "\nexplained_variance_ratio: " << pca.explained_variance_ratio.transpose()
          << "\ndegenerate: " << (pca.degenerate ? "true" : "false") << "\n";
  WriteFileAtomic(dir / "pca.txt", summary.str());
  out << summary.str();
  return kExitOk;
}

int AnalyzePairwise(const Globals& g, const std::vector<std::string>& checkpoints,
                    const std::string& env_id, int states, const std::string& stage,
                    std::ostream& out) {
  if (checkpoints.size() < 2) throw ConfigError("analyze-pairwise needs at least two checkpoints");
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  analysis::LatentStage latent_stage;
  if (stage == "interface") {
    latent_stage = analysis::LatentStage::kInterface;
  } else if (stage == "embedding") {
    latent_stage = analysis::LatentStage::kEmbedding;
  } else {
    throw ConfigError("--stage must be interface or embedding");
  }
  std::vector<io::Checkpoint> loaded;
  for (const std::string& p : checkpoints) loaded.push_back(Load(p));
  CheckEnvFits(loaded.front().actor, env);
  const analysis::StateSample sample =
      analysis::RolloutStates(loaded.front().actor, env, states, SeedOr(g, 0));
  std::vector<Eigen::MatrixXd> latents;
  for (const io::Checkpoint& c : loaded) {
    latents.push_back(analysis::TaskLatents(c.actor.network(), sample.task, latent_stage));
  }
  const analysis::DistanceReport report = analysis::PairwiseDistances(latents);
  out << report.ToText();
  if (!g.out.empty()) {
    WriteFileAtomic(fs::path(g.out) / "distances.txt", report.ToText());
    WriteFileAtomic(fs::path(g.out) / "distances.json", report.ToJson().dump(2) + "\n");
  }
  return kExitOk;
}

int AnalyzeRegression(const Globals& g, const std::string& checkpoint, const std::string& env_id,
                      int points, std::ostream& out) {
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  const io::Checkpoint c = Load(checkpoint);
  CheckEnvFits(c.actor, env);
  const analysis::RegressionReport report =
      analysis::RegressionProbe(c.actor, env, points, SeedOr(g, 0));
  out << report.ToText();
  if (!g.out.empty()) {
    WriteFileAtomic(fs::path(g.out) / "regression.txt", report.ToText());
    WriteFileAtomic(fs::path(g.out) / "regression.json", report.ToJson().dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stitchkit: modular policy training, stitching and analysis"};
  app.require_subcommand(1);
  Globals g;
  uint64_t seed_value = 0;
  app.add_option("--config", g.config, "run configuration (YAML)");
  app.add_option("--preset", g.preset, "named configuration: desk-reach, desk-push, smoke");
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed");
  app.add_option("--out", g.out, "output path or directory");
  app.fallthrough();

  auto* train = app.add_subcommand("train", "train a policy with SAC + HER");

  std::vector<std::string> ckpts;
  std::vector<std::string> env_ids;
  int k = 16;
  int episodes = 50;
  auto* collect = app.add_subcommand("collect-anchors", "cluster rollout states into anchors");
  collect->add_option("--checkpoint", ckpts, "trained policies (repeatable)")->required();
  collect->add_option("--env", env_ids, "environment of each policy (repeatable)")->required();
  collect->add_option("-k,--k", k, "number of anchors");
  collect->add_option("--episodes", episodes, "rollout episodes per policy");

  std::string task_ckpt;
  std::string robot_ckpt;
  std::string env_id;
  auto* stitch_cmd = app.add_subcommand("stitch", "combine a task module and a robot module");
  stitch_cmd->add_option("--task", task_ckpt, "checkpoint donating the task modules")->required();
  stitch_cmd->add_option("--robot", robot_ckpt, "checkpoint donating the robot modules")->required();
  stitch_cmd->add_option("--env", env_id, "target environment")->required();

  std::string ckpt;
  int repeats = 5;
  int eval_episodes = 200;
  auto* eval = app.add_subcommand("eval", "deterministic evaluation");
  eval->add_option("--checkpoint", ckpt)->required();
  eval->add_option("--env", env_id)->required();
  eval->add_option("--episodes", eval_episodes);
  eval->add_option("--repeats", repeats);

  int epochs = -1;
  int warmfill = 10;
  auto* finetune = app.add_subcommand("finetune", "few-shot fine-tuning of a stitched policy");
  finetune->add_option("--checkpoint", ckpt)->required();
  finetune->add_option("--env", env_id)->required();
  finetune->add_option("--epochs", epochs, "fine-tuning epochs (default: config)");
  finetune->add_option("--warmfill", warmfill, "replay warm-fill epochs");

  int states = 2000;
  auto* latent = app.add_subcommand("analyze-latent", "interface latents and 2-D PCA");
  latent->add_option("--checkpoint", ckpt)->required();
  latent->add_option("--env", env_id)->required();
  latent->add_option("--states", states);

  std::string stage = "interface";
  auto* pairwise = app.add_subcommand("analyze-pairwise", "mean pairwise latent distances");
  pairwise->add_option("--checkpoint", ckpts, "two or more policies (repeatable)")->required();
  pairwise->add_option("--env", env_id, "environment for the state set")->required();
  pairwise->add_option("--states", states);
  pairwise->add_option("--stage", stage, "interface or embedding");

  int points = 10000;
  auto* regression = app.add_subcommand("analyze-regression", "latent regression probe");
  regression->add_option("--checkpoint", ckpt)->required();
  regression->add_option("--env", env_id)->required();
  regression->add_option("--points", points);

  std::vector<std::string> argv_store;
  argv_store.push_back("stitchkit");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (train->parsed()) return Train(g, out);
    if (collect->parsed()) return CollectAnchors(g, ckpts, env_ids, k, episodes, out);
    if (stitch_cmd->parsed()) return StitchCmd(g, task_ckpt, robot_ckpt, env_id, out);
    if (eval->parsed()) return Eval(g, ckpt, env_id, eval_episodes, repeats, out);
    if (finetune->parsed()) return Finetune(g, ckpt, env_id, epochs, warmfill, out);
    if (latent->parsed()) return AnalyzeLatent(g, ckpt, env_id, states, out);
    if (pairwise->parsed()) return AnalyzePairwise(g, ckpts, env_id, states, stage, out);
    if (regression->parsed()) return AnalyzeRegression(g, ckpt, env_id, points, out);
  } catch (const IncompatibleError& e) {
    err << "incompatible: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const ShapeError& e) {
    err << "incompatible: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInput;
}

}  // namespace stitchkit::cli
