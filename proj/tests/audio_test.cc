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

#include "advdf/audio.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "advdf/common.h"
#include "advdf/corpus.h"
#include "gtest/gtest.h"

namespace advdf {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("advdf_audio_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void PutU16(std::string& s, unsigned v) {
  s += static_cast<char>(v & 0xff);
  s += static_cast<char>((v >> 8) & 0xff);
}

void PutU32(std::string& s, unsigned v) {
  PutU16(s, v & 0xffff);
  PutU16(s, v >> 16);
}

std::string FloatStereoWav(const std::vector<float>& left,
                           const std::vector<float>& right, int rate) {
  std::string s = "RIFF";
  const unsigned data = static_cast<unsigned>(left.size() * 8);
  PutU32(s, 36 + data);
  s += "WAVEfmt ";
  PutU32(s, 16);
  PutU16(s, 3);
  PutU16(s, 2);
  PutU32(s, rate);
  PutU32(s, rate * 8);
  PutU16(s, 8);
  PutU16(s, 32);
  s += "data";
  PutU32(s, data);
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (float f : {left[i], right[i]}) {
      s.append(reinterpret_cast<const char*>(&f), 4);
    }
  }
  return s;
}

TEST(Pcm16Test, RoundsAndSaturates) {
  EXPECT_EQ(ToPcm16(0.0), 0);
  EXPECT_EQ(ToPcm16(1.0), 32767);
  EXPECT_EQ(ToPcm16(-1.0), -32768);
  EXPECT_EQ(ToPcm16(2.0), 32767);
  EXPECT_EQ(ToPcm16(0.5), 16384);
  EXPECT_EQ(ToPcm16(1.4 / 32768.0), 1);
}

TEST(WavTest, Pcm16RoundTripIsExactOnGrid) {
  Waveform w;
  for (int i = -50; i < 50; ++i) w.samples.push_back(i * 300 / 32768.0);
  const Waveform back = DecodeWav(EncodeWavPcm16(w));
  ASSERT_EQ(back.size(), w.size());
  EXPECT_EQ(back.sample_rate_hz, kSampleRateHz);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_DOUBLE_EQ(back.samples[i], w.samples[i]);
  }
}

TEST(WavTest, FloatStereoIsAveraged) {
  const Waveform w = DecodeWav(FloatStereoWav({0.5f, -1.0f}, {0.25f, 0.0f}, 8000));
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.sample_rate_hz, 8000);
  EXPECT_DOUBLE_EQ(w.samples[0], 0.375);
  EXPECT_DOUBLE_EQ(w.samples[1], -0.5);
}

TEST(WavTest, RejectsGarbage) {
  try {
    DecodeWav("not a wav file at all, clearly");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedHeader);
  }
  std::string empty_payload = FloatStereoWav({}, {}, 16000);
  try {
    DecodeWav(empty_payload);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPayload);
  }
}

TEST(WavTest, FileRoundTrip) {
  const fs::path dir = TempDir("file");
  Waveform w;
  w.samples = {0.0, 0.25, -0.25, 0.5};
  SaveWav(dir / "x.wav", w);
  const Waveform back = LoadWav(dir / "x.wav");
  EXPECT_EQ(back.samples, w.samples);
}

TEST(ResampleTest, LengthAndIdentity) {
  Waveform w;
  w.samples.assign(8000, 0.1);
  w.sample_rate_hz = 8000;
  const Waveform up = Resample(w, 16000);
  EXPECT_EQ(up.size(), 16000u);
  EXPECT_EQ(up.sample_rate_hz, 16000);
  for (double v : up.samples) EXPECT_NEAR(v, 0.1, 1e-12);
  EXPECT_EQ(Resample(up, 16000).samples, up.samples);
}

TEST(ResampleTest, PreservesSlowRamp) {
  Waveform w;
  w.sample_rate_hz = 22050;
  for (int i = 0; i < 22050; ++i) w.samples.push_back(i / 22050.0);
  const Waveform out = Resample(w, kSampleRateHz);
  EXPECT_EQ(out.size(), 16000u);
  for (std::size_t j = 0; j + 1 < out.size(); j += 997) {
    EXPECT_NEAR(out.samples[j], j / 16000.0, 1e-9);
  }
}

TEST(StandardizeTest, TrimsAndTiles) {
  Waveform longer;
  longer.samples.resize(70000);
  for (std::size_t i = 0; i < longer.size(); ++i) longer.samples[i] = i;
  const Waveform trimmed = StandardizeDuration(longer);
  ASSERT_EQ(trimmed.size(), kStandardLength);
  EXPECT_EQ(trimmed.samples.back(), kStandardLength - 1.0);

  Waveform shorter;
  shorter.samples = {1.0, 2.0, 3.0};
  const Waveform tiled = StandardizeDuration(shorter);
  ASSERT_EQ(tiled.size(), kStandardLength);
  EXPECT_EQ(tiled.samples[3], 1.0);
  EXPECT_EQ(tiled.samples[kStandardLength - 1], shorter.samples[(kStandardLength - 1) % 3]);
  EXPECT_THROW(StandardizeDuration(Waveform{}), Error);
}

TEST(ManifestTest, RoundTripRelativePaths) {
  const fs::path dir = TempDir("manifest");
  const std::vector<ManifestRecord> records = {
      {dir / "train" / "a.wav", Label::kBonafide, Split::kTrain},
      {dir / "test" / "b.wav", Label::kFake, Split::kTest}};
  for (const auto& r : records) {
    fs::create_directories(r.path.parent_path());
    std::ofstream(r.path) << "";
  }
  WriteManifest(dir / "manifest.csv", records);
  EXPECT_EQ(ReadManifest(dir / "manifest.csv"), records);
  EXPECT_EQ(FilterSplit(records, Split::kTest).size(), 1u);
}

TEST(ManifestTest, NamesParse) {
  EXPECT_EQ(ParseLabel("fake"), Label::kFake);
  EXPECT_EQ(ParseLabel(LabelName(Label::kBonafide)), Label::kBonafide);
  EXPECT_EQ(ParseSplit("valid"), Split::kValid);
  EXPECT_THROW(ParseSplit("holdout"), Error);
}

TEST(BalanceTest, EqualizesClassesAndKeepsOrder) {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back({"b" + std::to_string(i), Label::kBonafide, Split::kTrain});
  for (int i = 0; i < 2; ++i) records.push_back({"f" + std::to_string(i), Label::kFake, Split::kTrain});
  const auto balanced = BalanceOversample(records, 9);
  ASSERT_EQ(balanced.size(), 10u);
  for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(balanced[i], records[i]);
  int fakes = 0;
  for (const auto& r : balanced) fakes += r.label == Label::kFake ? 1 : 0;
  EXPECT_EQ(fakes, 5);
  EXPECT_EQ(BalanceOversample(records, 9), balanced);
}

TEST(CorpusTest, StoresStandardizedAudio) {
  Corpus corpus;
  Waveform w;
  w.samples.assign(kStandardLength, 0.5);
  corpus.Add(w, Label::kFake);
  corpus.Add(w, Label::kBonafide);
  corpus.Add(w, Label::kFake);
  EXPECT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus.CountLabel(Label::kFake), 2u);
  EXPECT_EQ(corpus.waveform(0).samples, w.samples);
  const Corpus head = corpus.HeadPerClass(1);
  EXPECT_EQ(head.size(), 2u);
  EXPECT_EQ(head.label(0), Label::kFake);
  EXPECT_EQ(head.label(1), Label::kBonafide);
}

}  // namespace
}  // namespace advdf
