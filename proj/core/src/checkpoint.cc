// Copyright 2026 The advdf Authors
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

#include "advdf/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "advdf/common.h"
#include "json.hpp"

namespace advdf {
namespace {

constexpr std::string_view kMagic = "ADVDF01\n";

}  // namespace

Checkpoint CheckpointFromModel(const Model& model, std::uint64_t seed,
                               int epoch, std::string config_digest) {
  Checkpoint checkpoint;
  checkpoint.kind = model.kind();
  checkpoint.params.assign(model.params().begin(), model.params().end());
  checkpoint.seed = seed;
  checkpoint.epoch = epoch;
  checkpoint.config_digest = std::move(config_digest);
  return checkpoint;
}

std::unique_ptr<Model> ModelFromCheckpoint(const Checkpoint& checkpoint) {
  auto model = MakeModel(checkpoint.kind);
  model->SetParams(checkpoint.params);
  return model;
}

std::string EncodeCheckpoint(const Checkpoint& checkpoint) {
  Check(checkpoint.params.size() == MakeModel(checkpoint.kind)->ParameterCount(),
        ErrorCode::kShapeMismatch, "parameter count does not match model kind");
  nlohmann::json header = {
      {"version", kCheckpointVersion},
      {"kind", ModelKindName(checkpoint.kind)},
      {"count", checkpoint.params.size()},
      {"seed", checkpoint.seed},
      {"epoch", checkpoint.epoch},
      {"config_digest", checkpoint.config_digest},
      {"param_digest", Sha256Hex(checkpoint.params)},
  };
  std::string out(kMagic);
  out += header.dump();
  out += '\n';
  const std::size_t offset = out.size();
  out.resize(offset + checkpoint.params.size() * sizeof(double));
  if (!checkpoint.params.empty()) {
    std::memcpy(out.data() + offset, checkpoint.params.data(),
                checkpoint.params.size() * sizeof(double));
  }
  return out;
}

Checkpoint DecodeCheckpoint(std::string_view bytes,
                            std::optional<ModelKind> expected) {
  Check(bytes.size() >= kMagic.size() && bytes.substr(0, kMagic.size()) == kMagic,
        ErrorCode::kBadMagic, "not a checkpoint");
  const std::size_t newline = bytes.find('\n', kMagic.size());
  Check(newline != std::string_view::npos, ErrorCode::kTruncated,
        "checkpoint header is incomplete");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kMagic.size(), newline - kMagic.size()));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformedHeader, std::string("checkpoint header: ") + e.what());
  }
  Checkpoint checkpoint;
  std::size_t count = 0;
  std::string param_digest;
  try {
    Check(header.at("version").get<int>() == kCheckpointVersion,
          ErrorCode::kVersionMismatch,
          "checkpoint version " + header.at("version").dump());
    checkpoint.kind = ParseModelKind(header.at("kind").get<std::string>());
    count = header.at("count").get<std::size_t>();
    checkpoint.seed = header.at("seed").get<std::uint64_t>();
    checkpoint.epoch = header.at("epoch").get<int>();
    checkpoint.config_digest = header.at("config_digest").get<std::string>();
    param_digest = header.at("param_digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformedHeader, std::string("checkpoint header: ") + e.what());
  }
  if (expected.has_value()) {
    Check(*expected == checkpoint.kind, ErrorCode::kKindMismatch,
          "checkpoint holds " + std::string(ModelKindName(checkpoint.kind)) +
              ", expected " + std::string(ModelKindName(*expected)));
  }
  Check(count == MakeModel(checkpoint.kind)->ParameterCount(),
        ErrorCode::kShapeMismatch, "parameter count does not match model kind");
  const std::string_view payload = bytes.substr(newline + 1);
  Check(payload.size() >= count * sizeof(double), ErrorCode::kTruncated,
        "checkpoint payload is short");
  Check(payload.size() == count * sizeof(double), ErrorCode::kMalformedHeader,
        "trailing bytes after checkpoint payload");
  checkpoint.params.resize(count);
  if (count > 0) std::memcpy(checkpoint.params.data(), payload.data(), payload.size());
  Check(Sha256Hex(checkpoint.params) == param_digest, ErrorCode::kDigestMismatch,
        "parameter digest does not match header");
  return checkpoint;
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const Checkpoint& checkpoint) {
  const std::string bytes = EncodeCheckpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Check(out.good(), ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Check(out.good(), ErrorCode::kIo, "short write to " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          std::optional<ModelKind> expected) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DecodeCheckpoint(buffer.str(), expected);
}

}  // namespace advdf
