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

#include <cmath>
#include <sstream>
#include <vector>

#include "advdf/audio.h"
#include "advdf/common.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace advdf::dsp {
namespace {

TEST(FramingTest, StandardUtteranceHas398Frames) {
  EXPECT_EQ(FrameCount(kStandardLength, {}), 398);
  EXPECT_EQ(FrameCount(400, {}), 1);
  EXPECT_EQ(FrameCount(559, {}), 1);
  EXPECT_EQ(FrameCount(560, {}), 2);
  EXPECT_EQ(FrameSpec{}.bins(), 257);
}

TEST(HannTest, PeriodicShape) {
  const std::vector<double> w = HannWindow(400);
  ASSERT_EQ(w.size(), 400u);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_NEAR(w[200], 1.0, 1e-15);
  EXPECT_NEAR(w[100], 0.5, 1e-15);
  EXPECT_NEAR(w[1], w[399], 1e-15);
}

TEST(StftTest, SinePeaksAtItsBin) {
  std::vector<double> x(4000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * 3.141592653589793 * 1000.0 * i / 16000.0);
  }
  const Matrix mag = StftMagnitude(x);
  ASSERT_EQ(mag.cols(), 257);
  Eigen::Index peak = 0;
  mag.row(3).maxCoeff(&peak);
  EXPECT_EQ(peak, 32);  // 1000 Hz / 31.25 Hz
  // Hann coherent gain: sum(w) / 2 = 100.
  EXPECT_NEAR(mag(3, 32), 100.0, 1e-9);
}

TEST(FilterbankTest, ShapesAndPeaks) {
  const Matrix linear = FilterbankMatrix({});
  EXPECT_EQ(linear.rows(), 257);
  EXPECT_EQ(linear.cols(), 80);
  EXPECT_GE(linear.minCoeff(), 0.0);
  EXPECT_LE(linear.maxCoeff(), 1.0);
  for (int m = 0; m < 80; ++m) EXPECT_GT(linear.col(m).maxCoeff(), 0.3) << m;

  FilterbankSpec mel_spec;
  mel_spec.scale = FrequencyScale::kMel;
  mel_spec.n_filters = 20;
  const Matrix mel = FilterbankMatrix(mel_spec);
  EXPECT_EQ(mel.cols(), 20);
  // Mel triangles widen with frequency.
  EXPECT_GT(mel.col(19).sum(), mel.col(2).sum());
}

TEST(FilterbankTest, CoversInteriorBinsAndSumsAreas) {
  FilterbankSpec mel_spec;
  mel_spec.scale = FrequencyScale::kMel;
  const Matrix linear = FilterbankMatrix({});
  const Matrix mel = FilterbankMatrix(mel_spec);
  for (const Matrix* fb : {&linear, &mel}) {
    for (int k = 1; k < 256; ++k) EXPECT_GT(fb->row(k).maxCoeff(), 0.0) << k;
    const Matrix ones = Matrix::Ones(1, 257);
    const Matrix areas = ApplyFilterbank(ones, *fb);
    for (int m = 0; m < 80; ++m) EXPECT_NEAR(areas(0, m), fb->col(m).sum(), 1e-12);
  }
  EXPECT_GT((linear.rowwise().sum() - mel.rowwise().sum()).cwiseAbs().maxCoeff(), 0.1);
}

TEST(FilterbankTest, IdentityWarpMatchesLinear) {
  const auto identity = [](double f) { return f; };
  EXPECT_EQ(WarpedFilterbankMatrix({}, identity, identity), FilterbankMatrix({}));
}

TEST(MelTest, RoundTrip) {
  for (double hz : {0.0, 100.0, 1000.0, 8000.0}) {
    EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-9);
  }
  EXPECT_NEAR(HzToMel(1000.0), 999.9855, 1e-3);
}

TEST(LogTest, FloorAndNegativeEnergies) {
  Matrix e(1, 3);
  e << 0.0, 1.0, std::exp(2.0);
  const Matrix l = LogEnergies(e);
  EXPECT_DOUBLE_EQ(l(0, 0), std::log(kLogFloor));
  EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
  EXPECT_NEAR(l(0, 2), 2.0, 1e-15);
  const Matrix g = LogEnergiesVjp(e, Matrix::Ones(1, 3));
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(g(0, 1), 1.0);
  e(0, 1) = -1.0;
  EXPECT_THROW(LogEnergies(e), Error);
}

TEST(DctTest, OrthonormalAndInvertible) {
  const Matrix d = DctMatrix(80);
  EXPECT_TRUE((d * d.transpose()).isIdentity(1e-12));
  Rng rng(1);
  const auto values = oracle::RandomVector(3 * 80, rng, -2.0, 2.0);
  Matrix x(3, 80);
  std::copy(values.begin(), values.end(), x.data());
  EXPECT_TRUE(Dct3Orthonormal(Dct2Orthonormal(x)).isApprox(x, 1e-12));
  // Coefficient 0 of a constant row carries sqrt(n) times the value.
  const Matrix c = Dct2Orthonormal(Matrix::Constant(1, 80, 2.0));
  EXPECT_NEAR(c(0, 0), 2.0 * std::sqrt(80.0), 1e-12);
  EXPECT_NEAR(c.rightCols(79).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

// Golden values from an independent numpy/scipy implementation.
TEST(CepstraTest, LfccMatchesReference) {
  const FeatureMatrix f = Lfcc(oracle::ReferenceSignal());
  ASSERT_EQ(f.values.rows(), 398);
  ASSERT_EQ(f.values.cols(), 80);
  EXPECT_EQ(f.kind, FeatureKind::kLfcc);
  EXPECT_NEAR(f.values(0, 0), -52.84188428071715, 1e-9);
  EXPECT_NEAR(f.values(100, 5), 5.857371982010648, 1e-9);
  EXPECT_NEAR(f.values(397, 79), 0.7782029207122845, 1e-9);
  EXPECT_NEAR(f.values(250, 40), 1.9118224576113223, 1e-9);
}

TEST(CepstraTest, MfccMatchesReference) {
  const FeatureMatrix f = Mfcc(oracle::ReferenceSignal());
  ASSERT_EQ(f.values.cols(), 80);
  EXPECT_EQ(f.kind, FeatureKind::kMfcc);
  EXPECT_NEAR(f.values(0, 0), -44.998159735087754, 1e-9);
  EXPECT_NEAR(f.values(10, 3), -9.135727162378876, 1e-9);
  EXPECT_EQ(Mfcc(oracle::ReferenceSignal(), 14).values.cols(), 14);
}

TEST(CepstraTest, FrontEndGradientsMatchFiniteDifferences) {
  for (const auto& r : oracle::RunGradientChecks(2, 17)) {
    if (r.name == "stft_magnitude" || r.name == "filterbank" ||
        r.name == "log_energies" || r.name == "dct" || r.name == "lfcc_pipeline") {
      EXPECT_LT(r.worst_relative_error, 1e-4) << r.name;
    }
  }
}

TEST(FeatureDumpTest, RoundTrip) {
  FeatureMatrix f;
  f.kind = FeatureKind::kMfcc;
  f.values = Matrix::Random(4, 3);
  std::stringstream buffer;
  WriteFeatureDump(buffer, f);
  const FeatureMatrix back = ReadFeatureDump(buffer);
  EXPECT_EQ(back.kind, f.kind);
  EXPECT_EQ(back.values, f.values);
}

}  // namespace
}  // namespace advdf::dsp
