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

#include "advdf/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "advdf/common.h"

namespace advdf {
namespace {

void CheckFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    Check(std::isfinite(v), ErrorCode::kNonFinite,
          std::string("non-finite ") + what + " score");
  }
}

}  // namespace

double ComputeEer(const ScoreSet& scores) {
  Check(!scores.bonafide.empty() && !scores.fake.empty(),
        ErrorCode::kEmptyInput, "EER needs scores of both classes");
  CheckFinite(scores.bonafide, "bonafide");
  CheckFinite(scores.fake, "fake");

  std::vector<double> bonafide = scores.bonafide;
  std::vector<double> fake = scores.fake;
  std::sort(bonafide.begin(), bonafide.end());
  std::sort(fake.begin(), fake.end());
  std::vector<double> thresholds;
  thresholds.reserve(bonafide.size() + fake.size() + 1);
  thresholds.insert(thresholds.end(), bonafide.begin(), bonafide.end());
  thresholds.insert(thresholds.end(), fake.begin(), fake.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double n_bonafide = static_cast<double>(bonafide.size());
  const double n_fake = static_cast<double>(fake.size());
  auto rates = [&](double t) {
    const auto below_b = std::lower_bound(bonafide.begin(), bonafide.end(), t);
    const auto below_f = std::lower_bound(fake.begin(), fake.end(), t);
    const double fpr = static_cast<double>(bonafide.end() - below_b) / n_bonafide;
    const double fnr = static_cast<double>(below_f - fake.begin()) / n_fake;
    return std::pair<double, double>(fpr, fnr);
  };

  // FPR - FNR starts at 1 (lowest threshold) and ends at -1 (+inf).
  auto [prev_fpr, prev_fnr] = rates(thresholds.front());
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    const auto [fpr, fnr] = rates(thresholds[k]);
    const double d = fpr - fnr;
    if (d <= 0.0) {
      if (d == 0.0) return fpr;
      const double prev_d = prev_fpr - prev_fnr;
      const double lambda = prev_d / (prev_d - d);
      const double at_fpr = prev_fpr + lambda * (fpr - prev_fpr);
      const double at_fnr = prev_fnr + lambda * (fnr - prev_fnr);
      return 0.5 * (at_fpr + at_fnr);
    }
    prev_fpr = fpr;
    prev_fnr = fnr;
  }
  return 0.5;  // unreachable
}

double Accuracy(std::span<const int> predictions, std::span<const int> labels) {
  Check(!labels.empty(), ErrorCode::kEmptyInput, "accuracy of nothing");
  Check(predictions.size() == labels.size(), ErrorCode::kShapeMismatch,
        "prediction and label counts differ");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

dsp::Matrix McdCepstra(std::span<const double> waveform) {
  static const dsp::CepstralFrontEnd front_end =
      dsp::CepstralFrontEnd::Mfcc(kMcdMelFilters, kMcdLastCoeff + 1);
  const dsp::FeatureMatrix mfcc = front_end.Compute(waveform);
  return mfcc.values.rightCols(kMcdLastCoeff - kMcdFirstCoeff + 1);
}

double McdFromCepstra(const dsp::Matrix& reference, const dsp::Matrix& other) {
  Check(reference.rows() == other.rows() && reference.cols() == other.cols(),
        ErrorCode::kShapeMismatch, "cepstra shapes differ");
  Check(reference.rows() > 0, ErrorCode::kEmptyInput, "no frames");
  const double scale = 10.0 / std::numbers::ln10;
  double total = 0.0;
  for (Eigen::Index t = 0; t < reference.rows(); ++t) {
    const double sq = (reference.row(t) - other.row(t)).squaredNorm();
    total += scale * std::sqrt(2.0 * sq);
  }
  return total / static_cast<double>(reference.rows());
}

double ComputeMcd(std::span<const double> reference,
                  std::span<const double> other) {
  Check(reference.size() == other.size(), ErrorCode::kShapeMismatch,
        "MCD inputs differ in length");
  return McdFromCepstra(McdCepstra(reference), McdCepstra(other));
}

McdReport SummarizeMcd(std::vector<double> values) {
  McdReport report;
  report.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  if (!values.empty()) sum /= static_cast<double>(values.size());
  report.mean = sum;
  report.values = std::move(values);
  return report;
}

}  // namespace advdf
