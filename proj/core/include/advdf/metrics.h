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

#ifndef ADVDF_METRICS_H_
#define ADVDF_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "advdf/dsp.h"

namespace advdf {

// Detector scores, higher meaning more likely fake.
struct ScoreSet {
  std::vector<double> bonafide;
  std::vector<double> fake;
};

// Equal error rate. Thresholds sweep the sorted unique scores plus +inf;
// FPR(t) counts bonafide scores >= t and FNR(t) fake scores < t. The
// crossing of FPR - FNR is linearly interpolated between the two bracketing
// thresholds. Values above 0.5 occur for inverted classifiers.
double ComputeEer(const ScoreSet& scores);

// Fraction of positions where predictions[i] == labels[i].
double Accuracy(std::span<const int> predictions, std::span<const int> labels);

// Cepstra used for distortion: 20 mel filters, coefficients 1..13.
constexpr int kMcdMelFilters = 20;
constexpr int kMcdFirstCoeff = 1;
constexpr int kMcdLastCoeff = 13;

dsp::Matrix McdCepstra(std::span<const double> waveform);

// Frame-averaged (10 / ln 10) * sqrt(2 * sum_k (c_k - c'_k)^2) over
// frame-aligned cepstra of equal shape.
double McdFromCepstra(const dsp::Matrix& reference, const dsp::Matrix& other);

// Mel-cepstral distortion in dB between two equal-length waveforms.
double ComputeMcd(std::span<const double> reference,
                  std::span<const double> other);

struct McdReport {
  std::vector<double> values;
  double mean = 0.0;  // 0 when there are no values
  std::size_t count = 0;
};

McdReport SummarizeMcd(std::vector<double> values);

}  // namespace advdf

#endif  // ADVDF_METRICS_H_
