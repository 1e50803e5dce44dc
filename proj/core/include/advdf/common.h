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

#ifndef ADVDF_COMMON_H_
#define ADVDF_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace advdf {

// Every failure the library reports carries one of these codes so callers
// (and the CLI exit-code mapping) can tell error families apart.
enum class ErrorCode {
  kInvalidArgument,
  kIndexOutOfRange,
  kShapeMismatch,
  kEmptyInput,
  kNotFound,
  kAlreadyExists,
  kIo,
  // Audio decoding.
  kMalformedHeader,
  kUnsupportedCodec,
  kEmptyPayload,
  // Checkpoints and result schemas.
  kBadMagic,
  kVersionMismatch,
  kDigestMismatch,
  kTruncated,
  kKindMismatch,
  kSchemaMismatch,
  // Numerics.
  kNonFinite,
  kZeroGradient,
  kDivergence,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// True for codes that signal a numeric failure rather than bad input data.
bool IsNumericError(ErrorCode code);

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

inline void Check(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

// Seeded generator with explicitly defined derived distributions, so a given
// seed yields the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n), rejection sampled.
  std::size_t UniformIndex(std::size_t n);

  // Standard normal via Box-Muller.
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer; derives independent stream seeds from a base seed.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

// Keeps large scratch buffers on the heap instead of fresh mmap pages; the
// models allocate several MB per pass. Call once at program start. No-op
// outside glibc.
void ConfigureAllocator();

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256Hex(std::span<const double> values);

}  // namespace advdf

#endif  // ADVDF_COMMON_H_
