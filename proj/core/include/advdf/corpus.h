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

#ifndef ADVDF_CORPUS_H_
#define ADVDF_CORPUS_H_

#include <filesystem>
#include <vector>

#include "advdf/audio.h"

namespace advdf {

// Preprocessed (16 kHz, kStandardLength) utterances held in memory as
// float32. PCM16 sources are represented exactly.
class Corpus {
 public:
  Corpus() = default;

  // Loads and preprocesses every record, in order.
  static Corpus Load(const std::vector<ManifestRecord>& records);

  void Add(const Waveform& standardized, Label label,
           std::filesystem::path source = {});

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  Label label(std::size_t i) const { return labels_.at(i); }
  const std::filesystem::path& source(std::size_t i) const { return sources_.at(i); }
  Waveform waveform(std::size_t i) const;

  // Up to `per_class` utterances of each label, keeping corpus order.
  Corpus HeadPerClass(std::size_t per_class) const;

  std::size_t CountLabel(Label label) const;

 private:
  std::vector<std::vector<float>> samples_;
  std::vector<Label> labels_;
  std::vector<std::filesystem::path> sources_;
};

}  // namespace advdf

#endif  // ADVDF_CORPUS_H_
