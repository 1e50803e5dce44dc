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

#ifndef ADVDF_AUDIO_H_
#define ADVDF_AUDIO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace advdf {

inline constexpr int kSampleRateHz = 16000;
inline constexpr std::size_t kStandardLength = 64000;  // 4 s at 16 kHz

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRateHz;

  std::size_t size() const { return samples.size(); }
};

enum class Label : int { kBonafide = 0, kFake = 1 };
enum class Split { kTrain, kValid, kTest };

std::string_view LabelName(Label label);
std::string_view SplitName(Split split);
Label ParseLabel(std::string_view text);
Split ParseSplit(std::string_view text);

struct ManifestRecord {
  std::filesystem::path path;
  Label label = Label::kBonafide;
  Split split = Split::kTrain;

  bool operator==(const ManifestRecord&) const = default;
};

// Reads RIFF/WAVE with PCM16 or IEEE float32 payload; channels are averaged
// to mono and PCM16 is scaled by 1/32768.
Waveform LoadWav(const std::filesystem::path& path);
Waveform DecodeWav(std::string_view bytes);

// Writes mono PCM16 little-endian. Samples are clamped to [-1, 1] and
// rounded to the nearest code (+1.0 saturates at 32767).
void SaveWav(const std::filesystem::path& path, const Waveform& waveform);
std::string EncodeWavPcm16(const Waveform& waveform);

std::int16_t ToPcm16(double sample);

// Linear-interpolation resampler. Output length is
// round(len * target / source); identical rates return the input unchanged.
Waveform Resample(const Waveform& waveform, int target_hz);

// Trims to the first kStandardLength samples or tiles the input end-to-end
// until it reaches kStandardLength.
Waveform StandardizeDuration(const Waveform& waveform);

// Resample to 16 kHz then standardize duration.
Waveform Preprocess(const Waveform& waveform);

// CSV with header `path,label,split`. Relative paths are resolved against
// the manifest's directory on read and written relative to it.
std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestRecord>& records);

std::vector<ManifestRecord> FilterSplit(
    const std::vector<ManifestRecord>& records, Split split);

// Equalizes class counts by appending minority-class records drawn with
// replacement. Original records keep their order; duplicates follow.
std::vector<ManifestRecord> BalanceOversample(
    const std::vector<ManifestRecord>& records, std::uint64_t rng_seed);

}  // namespace advdf

#endif  // ADVDF_AUDIO_H_
