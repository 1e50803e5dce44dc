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

#ifndef ADVDF_CHECKPOINT_H_
#define ADVDF_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advdf/models.h"

namespace advdf {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelKind kind = ModelKind::kSpecNetLfcc;
  std::vector<double> params;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::string config_digest;
};

Checkpoint CheckpointFromModel(const Model& model, std::uint64_t seed,
                               int epoch, std::string config_digest);
std::unique_ptr<Model> ModelFromCheckpoint(const Checkpoint& checkpoint);

// Layout: the 8 bytes "ADVDF01\n", one JSON header line, then the
// parameters as little-endian float64.
std::string EncodeCheckpoint(const Checkpoint& checkpoint);
// When `expected` is set, a different kind tag is rejected.
Checkpoint DecodeCheckpoint(std::string_view bytes,
                            std::optional<ModelKind> expected = std::nullopt);

void SaveCheckpoint(const std::filesystem::path& path,
                    const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          std::optional<ModelKind> expected = std::nullopt);

}  // namespace advdf

#endif  // ADVDF_CHECKPOINT_H_
