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

#include "stitchkit/io/run_config.h"

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "stitchkit/envs/presets.h"
#include "stitchkit/errors.h"
#include "stitchkit/util/file_io.h"
#include "stitchkit/util/sha256.h"

namespace stitchkit::io {
namespace {

std::string Where(const std::string& origin, const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return origin;
  return origin + ":" + std::to_string(mark.line + 1);
}

// Reads the mapping `node`, dispatching each key to a handler and rejecting
// keys without one.
class Section {
 public:
  Section(const YAML::Node& node, std::string origin, std::string path)
      : node_(node), origin_(std::move(origin)), path_(std::move(path)) {
    if (!node.IsMap()) {
      throw ConfigError(Where(origin_, node) + ": '" + path_ + "' must be a mapping");
    }
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    handlers_[key] = [this, key, &out](const YAML::Node& value) {
      if (!value.IsScalar()) Fail(value, key, "expected a scalar");
      try {
        out = value.as<T>();
      } catch (const YAML::Exception&) {
        Fail(value, key, "has the wrong type");
      }
    };
  }

  void Sub(const std::string& key, std::function<void(Section&)> body) {
    handlers_[key] = [this, key, body](const YAML::Node& value) {
      Section child(value, origin_, Join(key));
      body(child);
      child.Finish();
    };
  }

  void Finish() {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string key = it->first.as<std::string>();
      auto handler = handlers_.find(key);
      if (handler == handlers_.end()) {
        throw ConfigError(Where(origin_, it->first) + ": unknown key '" + Join(key) + "'");
      }
      handler->second(it->second);
    }
  }

  [[noreturn]] void Fail(const YAML::Node& at, const std::string& key,
                         const std::string& why) const {
    throw ConfigError(Where(origin_, at) + ": '" + Join(key) + "' " + why);
  }

 private:
  std::string Join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node node_;
  std::string origin_;
  std::string path_;
  std::map<std::string, std::function<void(const YAML::Node&)>> handlers_;
};

}  // namespace

void RunConfig::Validate() const {
  envs::ParseEnvId(env_id);
  sac.Validate();
  training.Validate();
  if (architecture.devin_bottleneck <= 0) throw ConfigError("devin_bottleneck must be positive");
  if (!(architecture.devin_dropout >= 0.0 && architecture.devin_dropout < 1.0)) {
    throw ConfigError("devin_dropout must lie in [0, 1)");
  }
  if (architecture.method == policy::Method::kPs && anchors.empty()) {
    throw ConfigError("method ps needs paths.anchors");
  }
  if (!anchors.empty() && !std::filesystem::exists(anchors)) {
    throw ConfigError("anchor file " + anchors.string() + " does not exist");
  }
  if (!init_checkpoint.empty() && !std::filesystem::exists(init_checkpoint)) {
    throw ConfigError("checkpoint " + init_checkpoint.string() + " does not exist");
  }
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json j;
  j["schema_version"] = kRunConfigSchema;
  j["env"] = env_id;
  j["seed"] = seed;
  j["architecture"] = {{"method", policy::MethodName(architecture.method)},
                       {"size", policy::SizeName(architecture.size)},
                       {"devin_bottleneck", architecture.devin_bottleneck},
                       {"devin_dropout", architecture.devin_dropout},
                       {"critic_alignment", architecture.critic_alignment},
                       {"anchor_stop_gradient", architecture.anchor_stop_gradient}};
  nlohmann::json s = {{"gamma", sac.gamma},
                      {"tau", sac.tau},
                      {"batch_size", sac.batch_size},
                      {"learning_rate", sac.adam.learning_rate},
                      {"initial_alpha", sac.initial_alpha},
                      {"auto_alpha", sac.auto_alpha}};
  if (!std::isnan(sac.target_entropy)) s["target_entropy"] = sac.target_entropy;
  j["sac"] = s;
  j["her"] = {{"k_relabel", training.k_relabel},
              {"buffer_capacity", training.buffer_capacity}};
  j["training"] = {{"epochs", training.epochs},
                   {"cycles_per_epoch", training.cycles_per_epoch},
                   {"episodes_per_cycle", training.episodes_per_cycle},
                   {"updates_per_cycle", training.updates_per_cycle},
                   {"eval_episodes", training.eval_episodes},
                   {"random_episodes", training.random_episodes},
                   {"warmfill_epochs", training.warmfill_epochs}};
  nlohmann::json paths = nlohmann::json::object();
  if (!anchors.empty()) paths["anchors"] = anchors.string();
  if (!init_checkpoint.empty()) paths["init_checkpoint"] = init_checkpoint.string();
  j["paths"] = paths;
  return j;
}

std::string RunConfig::ToYaml() const {
  const nlohmann::json j = ToJson();
  std::ostringstream os;
  os << "schema_version: " << kRunConfigSchema << "\n";
  os << "env: " << env_id << "\n";
  os << "seed: " << seed << "\n";
  for (const char* section : {"architecture", "sac", "her", "training", "paths"}) {
    if (j[section].empty()) continue;
    os << section << ":\n";
    for (const auto& [key, value] : j[section].items()) {
      os << "  " << key << ": ";
      if (value.is_string()) {
        os << value.get<std::string>();
      } else {
        os << value.dump();
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string RunConfig::Hash() const {
  nlohmann::json j = ToJson();
  j.erase("seed");
  return Sha256Hex(j.dump());
}

RunConfig ParseRunConfig(const std::string& text, const std::filesystem::path& base_dir,
                         const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
  if (!root["schema_version"]) throw ConfigError(origin + ": missing schema_version");

  RunConfig c;
  int schema = 0;
  std::string method = policy::MethodName(c.architecture.method);
  std::string size = policy::SizeName(c.architecture.size);
  std::string anchors;
  std::string init;
  double lr = c.sac.adam.learning_rate;
  double target_entropy = c.sac.target_entropy;

  Section top(root, origin, "");
  top.Get("schema_version", schema);
  top.Get("env", c.env_id);
  top.Get("seed", c.seed);
  top.Sub("architecture", [&](Section& s) {
    s.Get("method", method);
    s.Get("size", size);
    s.Get("devin_bottleneck", c.architecture.devin_bottleneck);
    s.Get("devin_dropout", c.architecture.devin_dropout);
    s.Get("critic_alignment", c.architecture.critic_alignment);
    s.Get("anchor_stop_gradient", c.architecture.anchor_stop_gradient);
  });
  top.Sub("sac", [&](Section& s) {
    s.Get("gamma", c.sac.gamma);
    s.Get("tau", c.sac.tau);
    s.Get("batch_size", c.sac.batch_size);
    s.Get("learning_rate", lr);
    s.Get("initial_alpha", c.sac.initial_alpha);
    s.Get("auto_alpha", c.sac.auto_alpha);
    s.Get("target_entropy", target_entropy);
  });
  top.Sub("her", [&](Section& s) {
    s.Get("k_relabel", c.training.k_relabel);
    s.Get("buffer_capacity", c.training.buffer_capacity);
  });
  top.Sub("training", [&](Section& s) {
    s.Get("epochs", c.training.epochs);
    s.Get("cycles_per_epoch", c.training.cycles_per_epoch);
    s.Get("episodes_per_cycle", c.training.episodes_per_cycle);
    s.Get("updates_per_cycle", c.training.updates_per_cycle);
    s.Get("eval_episodes", c.training.eval_episodes);
    s.Get("random_episodes", c.training.random_episodes);
    s.Get("warmfill_epochs", c.training.warmfill_epochs);
  });
  top.Sub("paths", [&](Section& s) {
    s.Get("anchors", anchors);
    s.Get("init_checkpoint", init);
  });
  top.Finish();

  if (schema != kRunConfigSchema) {
    throw ConfigError(Where(origin, root["schema_version"]) +
                      ": unsupported schema_version " + std::to_string(schema));
  }
  auto located = [&](const char* section, const char* key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      throw ConfigError(Where(origin, root[section][key]) + ": " + e.what());
    }
  };
  located("architecture", "method", [&] { c.architecture.method = policy::ParseMethod(method); });
  located("architecture", "size", [&] { c.architecture.size = policy::ParseSize(size); });
  c.sac.adam.learning_rate = lr;
  c.sac.target_entropy = target_entropy;
  auto resolve = [&](const std::string& p) {
    if (p.empty()) return std::filesystem::path();
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  c.anchors = resolve(anchors);
  c.init_checkpoint = resolve(init);
  try {
    c.Validate();
  } catch (const ConfigError& e) {
    const char* key = nullptr;
    const std::string what = e.what();
    if (what.find("environment id") != std::string::npos) key = "env";
    throw ConfigError((key != nullptr ? Where(origin, root[key]) : origin) + ": " + what);
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  const std::string text = ReadFileText(path);
  return ParseRunConfig(text, path.parent_path(), path.string());
}

RunConfig PresetRunConfig(const std::string& name) {
  RunConfig c;
  if (name == "desk-reach") {
    c.env_id = "reach-r2";
    c.architecture.method = policy::Method::kPlain;
  } else if (name == "desk-push") {
    c.env_id = "push1-r3";
    c.architecture.method = policy::Method::kPlain;
  } else if (name == "smoke") {
    c.env_id = "reach-r2";
    c.architecture.method = policy::Method::kPlain;
    c.sac.batch_size = 32;
    c.training.epochs = 2;
    c.training.cycles_per_epoch = 2;
    c.training.episodes_per_cycle = 1;
    c.training.updates_per_cycle = 5;
    c.training.eval_episodes = 5;
  } else {
    throw ConfigError("unknown preset '" + name + "' (desk-reach, desk-push, smoke)");
  }
  return c;
}

}  // namespace stitchkit::io
