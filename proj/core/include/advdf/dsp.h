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

#ifndef ADVDF_DSP_H_
#define ADVDF_DSP_H_

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace advdf::dsp {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// 25 ms Hann window, 10 ms shift, 512-point FFT at 16 kHz.
struct FrameSpec {
  int win_length = 400;
  int hop = 160;
  int n_fft = 512;

  int bins() const { return n_fft / 2 + 1; }
  void Validate() const;
};

// floor((n - win_length) / hop) + 1; no end padding.
int FrameCount(std::size_t n_samples, const FrameSpec& spec);

// Periodic Hann window of the given length.
std::vector<double> HannWindow(int length);

struct StftCache {
  int frames = 0;
  int bins = 0;
  std::size_t n_samples = 0;
  std::vector<std::complex<double>> spectra;  // frames x bins
};

// T x (n_fft/2 + 1) magnitudes of the Hann-windowed, zero-padded frames.
Matrix StftMagnitude(std::span<const double> x, const FrameSpec& spec = {},
                     StftCache* cache = nullptr);

// Vector-Jacobian product back to the waveform. Bins with zero magnitude
// contribute no gradient.
std::vector<double> StftMagnitudeVjp(const StftCache& cache,
                                     const Matrix& cotangent,
                                     const FrameSpec& spec = {});

enum class FrequencyScale { kLinear, kMel };

struct FilterbankSpec {
  int n_filters = 80;
  FrequencyScale scale = FrequencyScale::kLinear;
  double f_min = 0.0;
  double f_max = 8000.0;
  int sample_rate_hz = 16000;
  int n_fft = 512;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Bins x filters matrix B of unit-peak triangles whose edge frequencies are
// equally spaced on the scale's axis.
Matrix FilterbankMatrix(const FilterbankSpec& spec);

// Same construction with an arbitrary monotone frequency warp; the identity
// warp reproduces the linear filterbank.
Matrix WarpedFilterbankMatrix(const FilterbankSpec& spec,
                              const std::function<double(double)>& warp,
                              const std::function<double(double)>& unwarp);

// e = (mag^2) B.
Matrix ApplyFilterbank(const Matrix& magnitude, const Matrix& filterbank);
Matrix ApplyFilterbankVjp(const Matrix& magnitude, const Matrix& filterbank,
                          const Matrix& cotangent);

inline constexpr double kLogFloor = 1e-10;

// log(max(e, 1e-10)); rejects negative energies.
Matrix LogEnergies(const Matrix& energies);
// Zero wherever the floor is active.
Matrix LogEnergiesVjp(const Matrix& energies, const Matrix& cotangent);

// n x n orthonormal DCT-II matrix; row k holds coefficient k.
Matrix DctMatrix(int n);

// Row-wise orthonormal DCT-II and its inverse (DCT-III).
Matrix Dct2Orthonormal(const Matrix& rows);
Matrix Dct3Orthonormal(const Matrix& coefficients);
Matrix Dct2Vjp(const Matrix& cotangent);

enum class FeatureKind { kLfcc, kMfcc };

struct FeatureMatrix {
  Matrix values;  // frames x coefficients
  FeatureKind kind = FeatureKind::kLfcc;
};

const char* FeatureKindName(FeatureKind kind);

struct FrontEndCache {
  StftCache stft;
  Matrix magnitude;
  Matrix energies;
};

// Framing -> |STFT| -> filterbank energies -> log -> orthonormal DCT, with
// the composed vector-Jacobian product back to the waveform.
class CepstralFrontEnd {
 public:
  CepstralFrontEnd(FeatureKind kind, const FilterbankSpec& filterbank,
                   int n_coeffs, const FrameSpec& frames = {});

  // 80 linear filters, all 80 coefficients.
  static CepstralFrontEnd Lfcc();
  // Mel filters; keeps the first n_coeffs coefficients.
  static CepstralFrontEnd Mfcc(int n_filters = 80, int n_coeffs = 80);

  FeatureMatrix Compute(std::span<const double> x,
                        FrontEndCache* cache = nullptr) const;
  std::vector<double> Vjp(const FrontEndCache& cache,
                          const Matrix& cotangent) const;

  FeatureKind kind() const { return kind_; }
  int n_coeffs() const { return n_coeffs_; }
  const FrameSpec& frames() const { return frames_; }
  const Matrix& filterbank() const { return filterbank_; }

 private:
  FeatureKind kind_;
  FrameSpec frames_;
  Matrix filterbank_;
  Matrix dct_;  // n_coeffs x n_filters, leading rows of the full DCT
  int n_coeffs_;
};

FeatureMatrix Lfcc(std::span<const double> x);
FeatureMatrix Mfcc(std::span<const double> x, int n_coeffs = 80);

// One JSON header line {"kind","T","C"} followed by row-major little-endian
// float64 values.
void WriteFeatureDump(std::ostream& out, const FeatureMatrix& features);
FeatureMatrix ReadFeatureDump(std::istream& in);

}  // namespace advdf::dsp

#endif  // ADVDF_DSP_H_
