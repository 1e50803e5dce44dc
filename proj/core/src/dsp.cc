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

#include "advdf/dsp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "advdf/common.h"
#include "fft.h"
#include "json.hpp"

namespace advdf::dsp {

void FrameSpec::Validate() const {
  Check(win_length > 0 && win_length <= n_fft && hop > 0 && n_fft > 0,
        ErrorCode::kInvalidArgument, "invalid frame spec");
}

int FrameCount(std::size_t n_samples, const FrameSpec& spec) {
  spec.Validate();
  Check(n_samples >= static_cast<std::size_t>(spec.win_length),
        ErrorCode::kShapeMismatch,
        "waveform of " + std::to_string(n_samples) +
            " samples is shorter than one window");
  return static_cast<int>((n_samples - spec.win_length) / spec.hop) + 1;
}

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

Matrix StftMagnitude(std::span<const double> x, const FrameSpec& spec,
                     StftCache* cache) {
  const int frames = FrameCount(x.size(), spec);
  const int bins = spec.bins();
  const std::vector<double> window = HannWindow(spec.win_length);

  Matrix buffer = Matrix::Zero(frames, spec.n_fft);
  for (int t = 0; t < frames; ++t) {
    const double* frame = x.data() + static_cast<std::size_t>(t) * spec.hop;
    double* row = buffer.row(t).data();
    for (int n = 0; n < spec.win_length; ++n) row[n] = frame[n] * window[n];
  }
  StftCache local;
  StftCache& out = cache != nullptr ? *cache : local;
  out.frames = frames;
  out.bins = bins;
  out.n_samples = x.size();
  out.spectra.resize(static_cast<std::size_t>(frames) * bins);
  internal::RealForward(spec.n_fft, buffer.data(), out.spectra.data(), frames);

  Matrix magnitude(frames, bins);
  for (std::size_t i = 0; i < out.spectra.size(); ++i) {
    magnitude.data()[i] = std::sqrt(std::norm(out.spectra[i]));
  }
  return magnitude;
}

std::vector<double> StftMagnitudeVjp(const StftCache& cache,
                                     const Matrix& cotangent,
                                     const FrameSpec& spec) {
  Check(cotangent.rows() == cache.frames && cotangent.cols() == cache.bins,
        ErrorCode::kShapeMismatch, "STFT cotangent shape");
  const std::vector<double> window = HannWindow(spec.win_length);
  const int last = cache.bins - 1;

  // d|X_k|/dx_m = Re(X_k e^{+i 2 pi k m / N}) / |X_k| per windowed sample,
  // summed over the one-sided spectrum with a Hermitian inverse transform.
  std::vector<std::complex<double>> weighted(cache.spectra.size());
  for (int t = 0; t < cache.frames; ++t) {
    const std::size_t base = static_cast<std::size_t>(t) * cache.bins;
    for (int k = 0; k < cache.bins; ++k) {
      const std::complex<double> x = cache.spectra[base + k];
      const double mag = std::sqrt(std::norm(x));
      std::complex<double> w = mag > 0.0 ? x * (cotangent(t, k) / mag) : 0.0;
      if (k != 0 && k != last) w *= 0.5;
      weighted[base + k] = w;
    }
  }
  Matrix frame_grad(cache.frames, spec.n_fft);
  internal::RealInverseInPlace(spec.n_fft, weighted.data(), frame_grad.data(),
                               cache.frames);

  std::vector<double> grad(cache.n_samples, 0.0);
  for (int t = 0; t < cache.frames; ++t) {
    const double* row = frame_grad.row(t).data();
    double* out = grad.data() + static_cast<std::size_t>(t) * spec.hop;
    for (int n = 0; n < spec.win_length; ++n) out[n] += window[n] * row[n];
  }
  return grad;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix WarpedFilterbankMatrix(const FilterbankSpec& spec,
                              const std::function<double(double)>& warp,
                              const std::function<double(double)>& unwarp) {
  Check(spec.n_filters > 0 && spec.f_max > spec.f_min && spec.f_min >= 0.0,
        ErrorCode::kInvalidArgument, "invalid filterbank spec");
  const int bins = spec.n_fft / 2 + 1;
  const int points = spec.n_filters + 2;
  const double lo = warp(spec.f_min);
  const double hi = warp(spec.f_max);
  std::vector<double> edges(points);
  for (int i = 0; i < points; ++i) {
    edges[i] = unwarp(lo + (hi - lo) * i / (points - 1));
  }

  Matrix fb = Matrix::Zero(bins, spec.n_filters);
  for (int k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * spec.sample_rate_hz / spec.n_fft;
    for (int m = 0; m < spec.n_filters; ++m) {
      const double left = edges[m];
      const double center = edges[m + 1];
      const double right = edges[m + 2];
      double weight = 0.0;
      if (f > left && f < center) {
        weight = (f - left) / (center - left);
      } else if (f == center) {
        weight = 1.0;
      } else if (f > center && f < right) {
        weight = (right - f) / (right - center);
      }
      fb(k, m) = weight;
    }
  }
  return fb;
}

Matrix FilterbankMatrix(const FilterbankSpec& spec) {
  if (spec.scale == FrequencyScale::kMel) {
    return WarpedFilterbankMatrix(spec, HzToMel, MelToHz);
  }
  const auto identity = [](double f) { return f; };
  return WarpedFilterbankMatrix(spec, identity, identity);
}

Matrix ApplyFilterbank(const Matrix& magnitude, const Matrix& filterbank) {
  Check(magnitude.cols() == filterbank.rows(), ErrorCode::kShapeMismatch,
        "magnitude has " + std::to_string(magnitude.cols()) +
            " bins, filterbank expects " + std::to_string(filterbank.rows()));
  return magnitude.array().square().matrix() * filterbank;
}

Matrix ApplyFilterbankVjp(const Matrix& magnitude, const Matrix& filterbank,
                          const Matrix& cotangent) {
  Check(magnitude.cols() == filterbank.rows() &&
            cotangent.rows() == magnitude.rows() &&
            cotangent.cols() == filterbank.cols(),
        ErrorCode::kShapeMismatch, "filterbank cotangent shape");
  Matrix grad = cotangent * filterbank.transpose();
  return (2.0 * magnitude.array() * grad.array()).matrix();
}

Matrix LogEnergies(const Matrix& energies) {
  Check((energies.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
        "negative filterbank energy");
  return energies.array().max(kLogFloor).log().matrix();
}

Matrix LogEnergiesVjp(const Matrix& energies, const Matrix& cotangent) {
  Check(energies.rows() == cotangent.rows() && energies.cols() == cotangent.cols(),
        ErrorCode::kShapeMismatch, "log cotangent shape");
  return (energies.array() > kLogFloor)
      .select(cotangent.array() / energies.array(), 0.0)
      .matrix();
}

Matrix DctMatrix(int n) {
  Check(n > 0, ErrorCode::kInvalidArgument, "DCT size must be positive");
  Matrix d(n, n);
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      d(k, i) = (k == 0 ? s0 : sk) *
                std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  return d;
}

Matrix Dct2Orthonormal(const Matrix& rows) {
  return rows * DctMatrix(static_cast<int>(rows.cols())).transpose();
}

Matrix Dct3Orthonormal(const Matrix& coefficients) {
  return coefficients * DctMatrix(static_cast<int>(coefficients.cols()));
}

Matrix Dct2Vjp(const Matrix& cotangent) {
  return cotangent * DctMatrix(static_cast<int>(cotangent.cols()));
}

const char* FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kLfcc ? "LFCC" : "MFCC";
}

CepstralFrontEnd::CepstralFrontEnd(FeatureKind kind,
                                   const FilterbankSpec& filterbank,
                                   int n_coeffs, const FrameSpec& frames)
    : kind_(kind),
      frames_(frames),
      filterbank_(FilterbankMatrix(filterbank)),
      n_coeffs_(n_coeffs) {
  frames_.Validate();
  Check(filterbank.n_fft == frames.n_fft, ErrorCode::kShapeMismatch,
        "filterbank and frame FFT sizes differ");
  Check(n_coeffs > 0 && n_coeffs <= filterbank.n_filters,
        ErrorCode::kInvalidArgument, "n_coeffs must be in [1, n_filters]");
  dct_ = DctMatrix(filterbank.n_filters).topRows(n_coeffs);
}

CepstralFrontEnd CepstralFrontEnd::Lfcc() {
  return CepstralFrontEnd(FeatureKind::kLfcc, FilterbankSpec{}, 80);
}

CepstralFrontEnd CepstralFrontEnd::Mfcc(int n_filters, int n_coeffs) {
  FilterbankSpec fb;
  fb.n_filters = n_filters;
  fb.scale = FrequencyScale::kMel;
  return CepstralFrontEnd(FeatureKind::kMfcc, fb, n_coeffs);
}

FeatureMatrix CepstralFrontEnd::Compute(std::span<const double> x,
                                        FrontEndCache* cache) const {
  StftCache local;
  StftCache* stft = cache != nullptr ? &cache->stft : &local;
  Matrix magnitude = StftMagnitude(x, frames_, stft);
  Matrix energies = ApplyFilterbank(magnitude, filterbank_);
  FeatureMatrix out{LogEnergies(energies) * dct_.transpose(), kind_};
  if (cache != nullptr) {
    cache->magnitude = std::move(magnitude);
    cache->energies = std::move(energies);
  }
  return out;
}

std::vector<double> CepstralFrontEnd::Vjp(const FrontEndCache& cache,
                                          const Matrix& cotangent) const {
  Check(cotangent.rows() == cache.energies.rows() && cotangent.cols() == n_coeffs_,
        ErrorCode::kShapeMismatch, "feature cotangent shape");
  const Matrix d_log = cotangent * dct_;
  const Matrix d_energy = LogEnergiesVjp(cache.energies, d_log);
  const Matrix d_mag = ApplyFilterbankVjp(cache.magnitude, filterbank_, d_energy);
  return StftMagnitudeVjp(cache.stft, d_mag, frames_);
}

FeatureMatrix Lfcc(std::span<const double> x) {
  static const CepstralFrontEnd front_end = CepstralFrontEnd::Lfcc();
  return front_end.Compute(x);
}

FeatureMatrix Mfcc(std::span<const double> x, int n_coeffs) {
  return CepstralFrontEnd::Mfcc(80, n_coeffs).Compute(x);
}

void WriteFeatureDump(std::ostream& out, const FeatureMatrix& features) {
  const nlohmann::json header = {{"kind", FeatureKindName(features.kind)},
                                 {"T", features.values.rows()},
                                 {"C", features.values.cols()}};
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(features.values.data()),
            static_cast<std::streamsize>(features.values.size() * sizeof(double)));
}

FeatureMatrix ReadFeatureDump(std::istream& in) {
  std::string line;
  Check(static_cast<bool>(std::getline(in, line)), ErrorCode::kTruncated,
        "missing feature dump header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kSchemaMismatch, std::string("feature dump header: ") + e.what());
  }
  FeatureMatrix features;
  const std::string kind = header.at("kind").get<std::string>();
  Check(kind == "LFCC" || kind == "MFCC", ErrorCode::kSchemaMismatch,
        "unknown feature kind " + kind);
  features.kind = kind == "LFCC" ? FeatureKind::kLfcc : FeatureKind::kMfcc;
  features.values.resize(header.at("T").get<long>(), header.at("C").get<long>());
  const auto bytes =
      static_cast<std::streamsize>(features.values.size() * sizeof(double));
  in.read(reinterpret_cast<char*>(features.values.data()), bytes);
  Check(in.gcount() == bytes, ErrorCode::kTruncated, "feature dump payload");
  return features;
}

}  // namespace advdf::dsp
