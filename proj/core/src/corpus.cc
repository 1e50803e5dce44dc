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

#include "advdf/corpus.h"

#include <algorithm>

#include "advdf/common.h"

namespace advdf {

Corpus Corpus::Load(const std::vector<ManifestRecord>& records) {
  Corpus corpus;
  for (const auto& r : records) {
    corpus.Add(Preprocess(LoadWav(r.path)), r.label, r.path);
  }
  return corpus;
}

void Corpus::Add(const Waveform& standardized, Label label,
                 std::filesystem::path source) {
  Check(standardized.size() == kStandardLength &&
            standardized.sample_rate_hz == kSampleRateHz,
        ErrorCode::kShapeMismatch, "corpus entries must be standardized");
  samples_.emplace_back(standardized.samples.begin(), standardized.samples.end());
  labels_.push_back(label);
  sources_.push_back(std::move(source));
}

Waveform Corpus::waveform(std::size_t i) const {
  const auto& s = samples_.at(i);
  return Waveform{std::vector<double>(s.begin(), s.end()), kSampleRateHz};
}

Corpus Corpus::HeadPerClass(std::size_t per_class) const {
  Corpus out;
  std::size_t taken[2] = {0, 0};
  for (std::size_t i = 0; i < size(); ++i) {
    auto& count = taken[static_cast<int>(labels_[i])];
    if (count >= per_class) continue;
    ++count;
    out.samples_.push_back(samples_[i]);
    out.labels_.push_back(labels_[i]);
    out.sources_.push_back(sources_[i]);
  }
  return out;
}

std::size_t Corpus::CountLabel(Label label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

}  // namespace advdf
