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

#include "stitchkit/io/checkpoint.h"

#include <cstring>
#include <utility>

#include "stitchkit/errors.h"
#include "stitchkit/util/file_io.h"
#include "stitchkit/util/sha256.h"

namespace stitchkit::io {
namespace {

constexpr char kMagic[8] = {'S', 'K', 'C', 'H', 'K', 'P', 'T', '\0'};
constexpr uint32_t kVersion = 1;
constexpr uint64_t kMaxSection = uint64_t{1} << 32;

struct Module {
  const char* name;
  const nn::Mlp* mlp;
};

std::vector<Module> Modules(const Checkpoint& c) {
  return {{"actor.task", &c.actor.network().task_module()},
          {"actor.robot", &c.actor.network().robot_module()},
          {"q1.task", &c.q1.network().task_module()},
          {"q1.robot", &c.q1.network().robot_module()},
          {"q2.task", &c.q2.network().task_module()},
          {"q2.robot", &c.q2.network().robot_module()}};
}

policy::SplitNetwork Rebuild(const nlohmann::json& spec_json, ByteReader& reader,
                             const nlohmann::json& table, size_t& index,
                             const std::shared_ptr<const policy::AnchorSet>& anchors,
                             const std::string& origin) {
  policy::NetworkSpec spec = policy::NetworkSpec::FromJson(spec_json);
  Rng scratch(0);
  policy::SplitNetwork net(spec, scratch);
  auto read = [&](const nn::Mlp& mlp) {
    const uint64_t count = table.at(index++).at("count").get<uint64_t>();
    if (count != static_cast<uint64_t>(mlp.num_params())) {
      throw ConfigError(origin + ": parameter count does not match the declared spec");
    }
    if (reader.remaining() < count * 8) throw ConfigError(origin + ": truncated payload");
    Eigen::VectorXd flat(static_cast<Eigen::Index>(count));
    for (uint64_t i = 0; i < count; ++i) flat(static_cast<Eigen::Index>(i)) = reader.F64();
    return flat;
  };
  net.SetTaskParams(read(net.task_module()));
  net.SetRobotParams(read(net.robot_module()));
  if (spec.kind == policy::NetworkKind::kModular &&
      spec.alignment == policy::Alignment::kRelative) {
    if (anchors == nullptr) throw ConfigError(origin + ": relative network without anchors");
    net.AttachAnchors(anchors);
  }
  return net;
}

}  // namespace

std::vector<uint8_t> SerializeCheckpoint(const Checkpoint& c) {
  nlohmann::json header;
  header["format"] = "stitchkit-checkpoint";
  header["actor"] = c.actor.network().spec().ToJson();
  header["q1"] = c.q1.network().spec().ToJson();
  header["q2"] = c.q2.network().spec().ToJson();
  header["anchor_hash"] = c.anchors != nullptr ? c.anchors->hash() : "";
  header["metadata"] = c.metadata;
  nlohmann::json table = nlohmann::json::array();
  for (const Module& m : Modules(c)) {
    table.push_back({{"name", m.name}, {"count", m.mlp->num_params()}});
  }
  header["modules"] = table;
  const std::string text = header.dump();

  std::vector<uint8_t> out(kMagic, kMagic + sizeof(kMagic));
  AppendU32(out, kVersion);
  AppendU64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  std::vector<uint8_t> anchor_bytes;
  if (c.anchors != nullptr) anchor_bytes = c.anchors->Serialize();
  AppendU64(out, anchor_bytes.size());
  out.insert(out.end(), anchor_bytes.begin(), anchor_bytes.end());
  for (const Module& m : Modules(c)) {
    const Eigen::VectorXd flat = m.mlp->Flatten();
    for (Eigen::Index i = 0; i < flat.size(); ++i) AppendF64(out, flat(i));
  }
  AppendF64(out, c.log_alpha);
  const std::string digest = Sha256Hex(std::span<const uint8_t>(out));
  out.insert(out.end(), digest.begin(), digest.end());
  return out;
}

Checkpoint DeserializeCheckpoint(std::span<const uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < sizeof(kMagic) + 4 + 64 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError(origin + " is not a checkpoint file");
  }
  const size_t body = bytes.size() - 64;
  const std::string stored(bytes.begin() + body, bytes.end());
  if (Sha256Hex(bytes.subspan(0, body)) != stored) {
    throw ConfigError(origin + ": checkpoint hash mismatch (corrupt file)");
  }
  ByteReader reader(bytes.subspan(0, body));
  reader.Take(sizeof(kMagic));
  const uint32_t version = reader.U32();
  if (version != kVersion) {
    throw ConfigError(origin + ": unsupported checkpoint version " + std::to_string(version));
  }
  const uint64_t header_size = reader.U64();
  if (header_size > kMaxSection || header_size > reader.remaining()) {
    throw ConfigError(origin + ": bad header length");
  }
  auto header_bytes = reader.Take(header_size);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin + ": malformed header: " + e.what());
  }
  Checkpoint c;
  try {
    const uint64_t anchor_size = reader.U64();
    if (anchor_size > reader.remaining()) throw ConfigError(origin + ": bad anchor length");
    if (anchor_size > 0) {
      ByteReader ar(reader.Take(anchor_size));
      const uint64_t k = ar.U64();
      const uint64_t d = ar.U64();
      if (k == 0 || d == 0 || k * d * 8 != ar.remaining()) {
        throw ConfigError(origin + ": bad anchor block");
      }
      Eigen::MatrixXd states(d, k);
      for (uint64_t j = 0; j < k; ++j) {
        for (uint64_t i = 0; i < d; ++i) states(i, j) = ar.F64();
      }
      c.anchors = std::make_shared<policy::AnchorSet>(std::move(states));
      if (c.anchors->hash() != header.at("anchor_hash").get<std::string>()) {
        throw ConfigError(origin + ": embedded anchors do not match the recorded hash");
      }
    }
    const nlohmann::json& table = header.at("modules");
    if (!table.is_array() || table.size() != 6) {
      throw ConfigError(origin + ": module table must list 6 modules");
    }
    size_t index = 0;
    c.actor = policy::Actor(Rebuild(header.at("actor"), reader, table, index, c.anchors, origin));
    c.q1 = policy::Critic(Rebuild(header.at("q1"), reader, table, index, c.anchors, origin));
    c.q2 = policy::Critic(Rebuild(header.at("q2"), reader, table, index, c.anchors, origin));
    if (reader.remaining() != 8) throw ConfigError(origin + ": unexpected payload size");
    c.log_alpha = reader.F64();
    c.metadata = header.at("metadata");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin + ": malformed header: " + e.what());
  }
  return c;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  WriteFileAtomic(path, SerializeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return DeserializeCheckpoint(bytes, path.string());
}

Checkpoint FromAgent(const rl::SacAgent& agent, nlohmann::json metadata) {
  Checkpoint c;
  c.actor = agent.actor();
  c.q1 = agent.q1();
  c.q2 = agent.q2();
  c.log_alpha = agent.log_alpha();
  for (const policy::SplitNetwork* net :
       {&c.actor.network(), &c.q1.network(), &c.q2.network()}) {
    if (net->anchors() != nullptr) c.anchors = net->anchors();
  }
  c.metadata = std::move(metadata);
  return c;
}

rl::SacAgent ToAgent(const Checkpoint& checkpoint, const rl::SacConfig& config, uint64_t seed) {
  rl::SacAgent agent(checkpoint.actor, checkpoint.q1, checkpoint.q2, config, seed);
  agent.set_log_alpha(checkpoint.log_alpha);
  return agent;
}

std::string CheckpointHash(const Checkpoint& checkpoint) {
  const std::vector<uint8_t> bytes = SerializeCheckpoint(checkpoint);
  return std::string(bytes.end() - 64, bytes.end());
}

}  // namespace stitchkit::io
