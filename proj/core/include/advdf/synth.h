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

#ifndef ADVDF_SYNTH_H_
#define ADVDF_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "advdf/audio.h"

namespace advdf {

// Desk-scale stand-in for a bona fide / generated speech corpus.
struct SynthSpec {
  int train_per_class = 1000;
  int valid_per_class = 100;
  int test_per_class = 1000;
  std::uint64_t seed = 0;
  double artifact_strength = 1.0;  // (0, 1]
  double duration_s = 4.0;

  void Validate() const;
};

enum class ArtifactFamily { kNone, kNotch, kQuantize, kTremolo };

// One utterance. The base voice comes from a stream derived from
// `utterance_seed`; fakes draw their artifact from a second stream, so a fake
// and a bona fide utterance built from the same seed differ only by the
// artifact. Output is standardized to kStandardLength samples in [-1, 1].
Waveform SynthesizeUtterance(std::uint64_t utterance_seed, Label label,
                             double artifact_strength, double duration_s = 4.0,
                             ArtifactFamily* family_out = nullptr);

std::uint64_t UtteranceSeed(std::uint64_t corpus_seed, Split split,
                            Label label, int index);

// Writes <out_dir>/<split>/<label>_<index>.wav for every utterance plus
// <out_dir>/manifest.csv, and returns the manifest records.
std::vector<ManifestRecord> SynthesizeDataset(const SynthSpec& spec,
                                              const std::filesystem::path& out_dir);

}  // namespace advdf

#endif  // ADVDF_SYNTH_H_
