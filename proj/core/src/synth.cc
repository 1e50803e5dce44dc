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

#include "advdf/synth.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "advdf/common.h"
#include "fft.h"

namespace advdf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEnvelopeStepS = 0.2;
constexpr double kTremoloHz = 50.0;
constexpr double kTremoloDepth = 1.0;
constexpr double kQuantizeLevels = 32.0;  // 6 bits over [-1, 1]
constexpr double kNotchHalfWidthHz = 500.0;
constexpr double kNotchTaperHz = 100.0;

std::vector<double> BaseVoice(Rng& rng, std::size_t n) {
  const double f0 = rng.Uniform(100.0, 300.0);
  const int harmonics = 3 + static_cast<int>(rng.UniformIndex(4));
  std::vector<double> amplitude(harmonics);
  std::vector<double> phase(harmonics);
  for (int h = 0; h < harmonics; ++h) {
    amplitude[h] = rng.Uniform(0.3, 1.0) / (h + 1);
    phase[h] = rng.Uniform(0.0, kTwoPi);
  }

  // Smooth envelope: raised-cosine interpolation between random knots.
  const double duration = static_cast<double>(n) / kSampleRateHz;
  const auto knots = static_cast<std::size_t>(duration / kEnvelopeStepS) + 2;
  std::vector<double> knot(knots);
  for (auto& k : knot) k = rng.Uniform(0.3, 1.0);

  const double peak = rng.Uniform(0.1, 0.3);
  const double noise_std = rng.Uniform(0.0015, 0.0025);

  std::vector<double> voice(n);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    const double u = t / kEnvelopeStepS;
    const auto k = static_cast<std::size_t>(u);
    const double frac = u - static_cast<double>(k);
    const double blend = 0.5 - 0.5 * std::cos(std::numbers::pi * frac);
    const double env = (1.0 - blend) * knot[k] + blend * knot[k + 1];
    double v = 0.0;
    for (int h = 0; h < harmonics; ++h) {
      v += amplitude[h] * std::sin(kTwoPi * f0 * (h + 1) * t + phase[h]);
    }
    voice[i] = env * v;
    max_abs = std::max(max_abs, std::abs(voice[i]));
  }
  const double gain = max_abs > 0.0 ? peak / max_abs : 0.0;
  for (auto& v : voice) v = v * gain + noise_std * rng.Normal();
  return voice;
}

void ApplyNotch(std::vector<double>& x, double center_hz, double strength) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> spectrum(n / 2 + 1);
  internal::RealForward(n, x.data(), spectrum.data());
  for (int k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * kSampleRateHz / n;
    const double distance = std::abs(f - center_hz);
    double depth = 0.0;
    if (distance <= kNotchHalfWidthHz - kNotchTaperHz) {
      depth = 1.0;
    } else if (distance < kNotchHalfWidthHz) {
      const double u = (kNotchHalfWidthHz - distance) / kNotchTaperHz;
      depth = 0.5 - 0.5 * std::cos(std::numbers::pi * u);
    }
    spectrum[k] *= 1.0 - strength * depth;
  }
  internal::RealInverse(n, spectrum.data(), x.data());
  for (auto& v : x) v /= n;
}

void ApplyQuantize(std::vector<double>& x, double strength) {
  for (auto& v : x) {
    const double q = std::round(v * kQuantizeLevels) / kQuantizeLevels;
    v += strength * (q - v);
  }
}

void ApplyTremolo(std::vector<double>& x, double phase, double strength) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    const double mod = 0.5 + 0.5 * std::sin(kTwoPi * kTremoloHz * t + phase);
    x[i] *= 1.0 - strength * kTremoloDepth * mod;
  }
}

}  // namespace

void SynthSpec::Validate() const {
  Check(train_per_class > 0 && valid_per_class > 0 && test_per_class > 0,
        ErrorCode::kInvalidArgument, "per-class counts must be positive");
  Check(artifact_strength > 0.0 && artifact_strength <= 1.0,
        ErrorCode::kInvalidArgument, "artifact_strength must lie in (0, 1]");
  Check(duration_s > 0.0, ErrorCode::kInvalidArgument,
        "duration_s must be positive");
}

Waveform SynthesizeUtterance(std::uint64_t utterance_seed, Label label,
                             double artifact_strength, double duration_s,
                             ArtifactFamily* family_out) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * kSampleRateHz));
  Check(n > 0, ErrorCode::kInvalidArgument, "utterance too short");

  Rng base_rng(MixSeed(utterance_seed, 0));
  std::vector<double> x = BaseVoice(base_rng, n);

  ArtifactFamily family = ArtifactFamily::kNone;
  if (label == Label::kFake) {
    Rng artifact_rng(MixSeed(utterance_seed, 1));
    const std::size_t pick = artifact_rng.UniformIndex(3);
    const double center = artifact_rng.Uniform(2500.0, 3500.0);
    const double phase = artifact_rng.Uniform(0.0, kTwoPi);
    switch (pick) {
      case 0:
        family = ArtifactFamily::kNotch;
        ApplyNotch(x, center, artifact_strength);
        break;
      case 1:
        family = ArtifactFamily::kQuantize;
        ApplyQuantize(x, artifact_strength);
        break;
      default:
        family = ArtifactFamily::kTremolo;
        ApplyTremolo(x, phase, artifact_strength);
        break;
    }
  }
  if (family_out != nullptr) *family_out = family;

  for (auto& v : x) v = std::clamp(v, -1.0, 1.0);
  return StandardizeDuration(Waveform{std::move(x), kSampleRateHz});
}

std::uint64_t UtteranceSeed(std::uint64_t corpus_seed, Split split,
                            Label label, int index) {
  const std::uint64_t stream = (static_cast<std::uint64_t>(split) << 40) |
                               (static_cast<std::uint64_t>(label) << 32) |
                               static_cast<std::uint32_t>(index);
  return MixSeed(corpus_seed, stream);
}

std::vector<ManifestRecord> SynthesizeDataset(const SynthSpec& spec,
                                              const std::filesystem::path& out_dir) {
  spec.Validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  Check(!ec, ErrorCode::kIo, "cannot create " + out_dir.string());

  std::vector<ManifestRecord> records;
  const std::pair<Split, int> splits[] = {{Split::kTrain, spec.train_per_class},
                                          {Split::kValid, spec.valid_per_class},
                                          {Split::kTest, spec.test_per_class}};
  for (const auto& [split, count] : splits) {
    const std::filesystem::path dir = out_dir / SplitName(split);
    std::filesystem::create_directories(dir, ec);
    Check(!ec, ErrorCode::kIo, "cannot create " + dir.string());
    for (Label label : {Label::kBonafide, Label::kFake}) {
      for (int i = 0; i < count; ++i) {
        const Waveform w =
            SynthesizeUtterance(UtteranceSeed(spec.seed, split, label, i), label,
                                spec.artifact_strength, spec.duration_s);
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%05d.wav",
                      std::string(LabelName(label)).c_str(), i);
        const std::filesystem::path path = dir / name;
        SaveWav(path, w);
        records.push_back({path, label, split});
      }
    }
  }
  WriteManifest(out_dir / "manifest.csv", records);
  return records;
}

}  // namespace advdf
