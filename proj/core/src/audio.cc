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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "advdf/common.h"

namespace advdf {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Check(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::string_view LabelName(Label label) {
  return label == Label::kBonafide ? "bonafide" : "fake";
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

Label ParseLabel(std::string_view text) {
  if (text == "bonafide") return Label::kBonafide;
  if (text == "fake") return Label::kFake;
  Fail(ErrorCode::kInvalidArgument, "unknown label '" + std::string(text) + "'");
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid") return Split::kValid;
  if (text == "test") return Split::kTest;
  Fail(ErrorCode::kInvalidArgument, "unknown split '" + std::string(text) + "'");
}

Waveform DecodeWav(std::string_view bytes) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  Check(size >= 12 && std::memcmp(data, "RIFF", 4) == 0 &&
            std::memcmp(data + 8, "WAVE", 4) == 0,
        ErrorCode::kMalformedHeader, "missing RIFF/WAVE signature");

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  const unsigned char* payload = nullptr;
  std::size_t payload_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t chunk_size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      Check(chunk_size >= 16 && body + chunk_size <= size,
            ErrorCode::kMalformedHeader, "truncated fmt chunk");
      format = ReadU16(data + body);
      channels = ReadU16(data + body + 2);
      rate = ReadU32(data + body + 4);
      bits = ReadU16(data + body + 14);
      if (format == kFormatExtensible) {
        Check(chunk_size >= 26, ErrorCode::kMalformedHeader,
              "truncated WAVE_FORMAT_EXTENSIBLE fmt chunk");
        format = ReadU16(data + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      Check(have_fmt, ErrorCode::kMalformedHeader, "data chunk before fmt");
      payload = data + body;
      // Streaming writers sometimes leave the size unset; clip to the file.
      payload_size = std::min<std::size_t>(chunk_size, size - body);
      have_data = true;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  Check(have_fmt, ErrorCode::kMalformedHeader, "missing fmt chunk");
  Check(have_data, ErrorCode::kMalformedHeader, "missing data chunk");
  Check(channels >= 1, ErrorCode::kMalformedHeader, "zero channels");
  Check(rate > 0, ErrorCode::kMalformedHeader, "zero sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  Check(pcm16 || float32, ErrorCode::kUnsupportedCodec,
        "format " + std::to_string(format) + " with " + std::to_string(bits) +
            " bits per sample");

  const std::size_t bytes_per_frame = channels * (bits / 8);
  const std::size_t frames = payload_size / bytes_per_frame;
  Check(frames > 0, ErrorCode::kEmptyPayload, "no audio frames");

  Waveform out;
  out.sample_rate_hz = static_cast<int>(rate);
  out.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const unsigned char* frame = payload + f * bytes_per_frame;
    double sum = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      if (pcm16) {
        const auto v = static_cast<std::int16_t>(ReadU16(frame + 2 * c));
        sum += static_cast<double>(v) / 32768.0;
      } else {
        const std::uint32_t raw = ReadU32(frame + 4 * c);
        float v;
        std::memcpy(&v, &raw, sizeof(v));
        sum += static_cast<double>(v);
      }
    }
    const double mono = sum / channels;
    Check(std::isfinite(mono), ErrorCode::kNonFinite, "non-finite sample");
    out.samples[f] = mono;
  }
  return out;
}

Waveform LoadWav(const std::filesystem::path& path) {
  try {
    return DecodeWav(ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::int16_t ToPcm16(double sample) {
  const double scaled = std::round(std::clamp(sample, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::string EncodeWavPcm16(const Waveform& waveform) {
  const auto data_bytes = static_cast<std::uint32_t>(waveform.size() * 2);
  const auto rate = static_cast<std::uint32_t>(waveform.sample_rate_hz);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, rate);
  PutU32(out, rate * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (double s : waveform.samples) {
    PutU16(out, static_cast<std::uint16_t>(ToPcm16(s)));
  }
  return out;
}

void SaveWav(const std::filesystem::path& path, const Waveform& waveform) {
  const std::string bytes = EncodeWavPcm16(waveform);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Check(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Check(static_cast<bool>(out), ErrorCode::kIo, "short write " + path.string());
}

Waveform Resample(const Waveform& waveform, int target_hz) {
  Check(waveform.sample_rate_hz > 0 && target_hz > 0,
        ErrorCode::kInvalidArgument, "sample rates must be positive");
  if (waveform.sample_rate_hz == target_hz) return waveform;
  Check(!waveform.samples.empty(), ErrorCode::kEmptyInput, "empty waveform");

  const double ratio = static_cast<double>(waveform.sample_rate_hz) / target_hz;
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(waveform.size()) * target_hz / waveform.sample_rate_hz));
  const std::size_t last = waveform.size() - 1;

  Waveform out;
  out.sample_rate_hz = target_hz;
  out.samples.resize(out_len);
  for (std::size_t j = 0; j < out_len; ++j) {
    const double position = static_cast<double>(j) * ratio;
    const auto left = static_cast<std::size_t>(position);
    if (left >= last) {
      out.samples[j] = waveform.samples[last];
      continue;
    }
    const double frac = position - static_cast<double>(left);
    out.samples[j] = (1.0 - frac) * waveform.samples[left] +
                     frac * waveform.samples[left + 1];
  }
  return out;
}

Waveform StandardizeDuration(const Waveform& waveform) {
  Check(!waveform.samples.empty(), ErrorCode::kEmptyInput,
        "cannot standardize an empty waveform");
  Waveform out;
  out.sample_rate_hz = waveform.sample_rate_hz;
  out.samples.resize(kStandardLength);
  const std::size_t n = waveform.size();
  for (std::size_t i = 0; i < kStandardLength; ++i) {
    out.samples[i] = waveform.samples[i % n];
  }
  return out;
}

Waveform Preprocess(const Waveform& waveform) {
  return StandardizeDuration(Resample(waveform, kSampleRateHz));
}

std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  Check(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  const std::filesystem::path base = path.parent_path();

  std::string line;
  Check(static_cast<bool>(std::getline(in, line)), ErrorCode::kSchemaMismatch,
        "empty manifest " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Check(line == "path,label,split", ErrorCode::kSchemaMismatch,
        "unexpected manifest header '" + line + "'");

  std::vector<ManifestRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    Check(c2 != std::string::npos && line.find(',', c2 + 1) == std::string::npos,
          ErrorCode::kSchemaMismatch,
          path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    ManifestRecord record;
    std::filesystem::path file = line.substr(0, c1);
    record.path = file.is_absolute() ? file : base / file;
    record.label = ParseLabel(line.substr(c1 + 1, c2 - c1 - 1));
    record.split = ParseSplit(line.substr(c2 + 1));
    Check(std::filesystem::exists(record.path), ErrorCode::kNotFound,
          "manifest entry missing: " + record.path.string());
    records.push_back(std::move(record));
  }
  return records;
}

void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestRecord>& records) {
  const std::filesystem::path base = path.parent_path();
  std::ostringstream body;
  body << "path,label,split\n";
  for (const auto& r : records) {
    std::filesystem::path rel = r.path;
    if (!base.empty() && r.path.is_absolute() == base.is_absolute()) {
      rel = r.path.lexically_relative(base);
      if (rel.empty()) rel = r.path;
    }
    body << rel.generic_string() << ',' << LabelName(r.label) << ','
         << SplitName(r.split) << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Check(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << body.str();
}

std::vector<ManifestRecord> FilterSplit(
    const std::vector<ManifestRecord>& records, Split split) {
  std::vector<ManifestRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [split](const ManifestRecord& r) { return r.split == split; });
  return out;
}

std::vector<ManifestRecord> BalanceOversample(
    const std::vector<ManifestRecord>& records, std::uint64_t rng_seed) {
  std::vector<std::size_t> bonafide;
  std::vector<std::size_t> fake;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].label == Label::kBonafide ? bonafide : fake).push_back(i);
  }
  Check(!bonafide.empty() && !fake.empty(), ErrorCode::kEmptyInput,
        "oversampling needs at least one record per class");

  std::vector<ManifestRecord> out = records;
  const auto& minority = bonafide.size() < fake.size() ? bonafide : fake;
  const std::size_t deficit =
      std::max(bonafide.size(), fake.size()) - minority.size();
  Rng rng(rng_seed);
  for (std::size_t k = 0; k < deficit; ++k) {
    out.push_back(records[minority[rng.UniformIndex(minority.size())]]);
  }
  return out;
}

}  // namespace advdf
