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

#include "fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace advdf::internal {
namespace {

enum class Direction { kForward, kInverse };

// SIMD plans require every executed array to share the planning arrays'
// alignment, so plans are keyed by it.
fftw_plan PlanFor(Direction direction, int n, int count, bool aligned) {
  using Key = std::tuple<Direction, int, int, bool>;
  static std::mutex mutex;
  static std::map<Key, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const Key key{direction, n, count, aligned};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int bins = n / 2 + 1;
  double* real = fftw_alloc_real(static_cast<std::size_t>(n) * count);
  fftw_complex* spectrum = fftw_alloc_complex(static_cast<std::size_t>(bins) * count);
  const unsigned flags = FFTW_ESTIMATE | (aligned ? 0u : FFTW_UNALIGNED);
  fftw_plan plan =
      direction == Direction::kForward
          ? fftw_plan_many_dft_r2c(1, &n, count, real, nullptr, 1, n, spectrum,
                                   nullptr, 1, bins, flags)
          : fftw_plan_many_dft_c2r(1, &n, count, spectrum, nullptr, 1, bins, real,
                                   nullptr, 1, n, flags | FFTW_DESTROY_INPUT);
  fftw_free(real);
  fftw_free(spectrum);
  cache.emplace(key, plan);
  return plan;
}

bool Aligned(const void* a, const void* b) {
  return fftw_alignment_of(static_cast<double*>(const_cast<void*>(a))) == 0 &&
         fftw_alignment_of(static_cast<double*>(const_cast<void*>(b))) == 0;
}

}  // namespace

void RealForward(int n, const double* in, std::complex<double>* out, int count) {
  fftw_plan plan = PlanFor(Direction::kForward, n, count, Aligned(in, out));
  fftw_execute_dft_r2c(plan, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealInverseInPlace(int n, std::complex<double>* in, double* out, int count) {
  fftw_plan plan = PlanFor(Direction::kInverse, n, count, Aligned(in, out));
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in), out);
}

void RealInverse(int n, const std::complex<double>* in, double* out, int count) {
  std::vector<std::complex<double>> scratch(
      in, in + static_cast<std::size_t>(n / 2 + 1) * count);
  RealInverseInPlace(n, scratch.data(), out, count);
}

}  // namespace advdf::internal
