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

#ifndef ADVDF_SRC_FFT_H_
#define ADVDF_SRC_FFT_H_

#include <complex>

namespace advdf::internal {

// Unnormalized one-sided real DFTs of `count` contiguous length-n rows:
// out[r][k] = sum_m in[r][m] e^{-2 pi i k m / n}, k = 0..n/2. Rows of `out`
// have n/2 + 1 entries. Thread-safe; plans are cached per (n, count) and
// alignment.
void RealForward(int n, const double* in, std::complex<double>* out, int count = 1);

// Unnormalized Hermitian inverse of the same layout. The input is left
// untouched; imaginary parts of DC and Nyquist are ignored.
void RealInverse(int n, const std::complex<double>* in, double* out, int count = 1);

// As RealInverse but allowed to overwrite `in`; avoids a copy.
void RealInverseInPlace(int n, std::complex<double>* in, double* out, int count = 1);

}  // namespace advdf::internal

#endif  // ADVDF_SRC_FFT_H_
