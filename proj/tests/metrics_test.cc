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

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "advdf/common.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace advdf {
namespace {

TEST(EerTest, FrozenExamples) {
  EXPECT_NEAR(ComputeEer({{0.1, 0.4, 0.35, 0.8}, {0.2, 0.9, 0.6, 0.7}}), 0.25, 1e-12);
  EXPECT_NEAR(ComputeEer({{0.0, 1.0, 2.0}, {0.5, 1.5, 2.5, 3.0, -1.0}}), 0.4, 1e-12);
  EXPECT_NEAR(ComputeEer({{1.0, 2.0}, {1.0, 2.0}}), 0.5, 1e-12);
}

TEST(EerTest, SeparatedAndInverted) {
  EXPECT_EQ(ComputeEer({{-3.0, -2.0, -1.0}, {1.0, 2.0}}), 0.0);
  EXPECT_EQ(ComputeEer({{1.0, 2.0}, {-3.0, -2.0, -1.0}}), 1.0);
}

TEST(EerTest, MatchesBruteForceOnRandomSets) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nb = 1 + rng.UniformIndex(100);
    const std::size_t nf = 1 + rng.UniformIndex(100);
    const bool quantize = trial % 3 == 0;
    ScoreSet s;
    for (std::size_t i = 0; i < nb; ++i) s.bonafide.push_back(rng.Normal());
    for (std::size_t i = 0; i < nf; ++i) s.fake.push_back(rng.Normal() + 0.8);
    if (quantize) {
      for (auto& v : s.bonafide) v = std::round(v * 2.0);
      for (auto& v : s.fake) v = std::round(v * 2.0);
    }
    EXPECT_NEAR(ComputeEer(s), oracle::BruteForceEer(s.bonafide, s.fake), 1e-9)
        << "trial " << trial;
  }
}

TEST(EerTest, InvariantUnderMonotoneTransform) {
  Rng rng(8);
  ScoreSet s;
  for (int i = 0; i < 50; ++i) s.bonafide.push_back(rng.Normal());
  for (int i = 0; i < 40; ++i) s.fake.push_back(rng.Normal() + 1.0);
  ScoreSet t = s;
  for (auto& v : t.bonafide) v = std::exp(v);
  for (auto& v : t.fake) v = std::exp(v);
  EXPECT_NEAR(ComputeEer(s), ComputeEer(t), 1e-12);
}

TEST(EerTest, RejectsBadInput) {
  try {
    ComputeEer({{}, {1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  try {
    ComputeEer({{std::numeric_limits<double>::quiet_NaN()}, {1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
}

TEST(AccuracyTest, CountsMatches) {
  const std::vector<int> p = {1, 0, 1, 1};
  const std::vector<int> y = {1, 1, 1, 0};
  EXPECT_DOUBLE_EQ(Accuracy(p, y), 0.5);
  EXPECT_THROW(Accuracy(p, std::vector<int>{1}), Error);
}

TEST(McdTest, SingleCoefficientOffset) {
  dsp::Matrix a = dsp::Matrix::Zero(5, 13);
  dsp::Matrix b = a;
  b.col(4).array() += 1.0;
  const double expected = 10.0 / std::numbers::ln10 * std::sqrt(2.0);
  EXPECT_NEAR(McdFromCepstra(a, b), expected, 1e-9);
  EXPECT_NEAR(expected, 6.1418, 1e-4);
}

TEST(McdTest, IdenticalInputsGiveZero) {
  const std::vector<double> x = oracle::ReferenceSignal();
  EXPECT_EQ(ComputeMcd(x, x), 0.0);
}

TEST(McdTest, CepstraShape) {
  const dsp::Matrix c = McdCepstra(oracle::ReferenceSignal());
  EXPECT_EQ(c.rows(), 398);
  EXPECT_EQ(c.cols(), kMcdLastCoeff - kMcdFirstCoeff + 1);
}

// Golden value from an independent numpy/scipy implementation.
TEST(McdTest, MatchesReference) {
  EXPECT_NEAR(ComputeMcd(oracle::ReferenceSignal(), oracle::ReferenceSignal(true)),
              47.7395794695468, 1e-8);
}

TEST(McdTest, GainChangeOnlyMovesC0) {
  std::vector<double> x = oracle::ReferenceSignal();
  std::vector<double> y = x;
  for (auto& v : y) v *= 0.5;
  EXPECT_NEAR(ComputeMcd(x, y), 0.0, 1e-9);
}

TEST(McdTest, RejectsMismatchedLengths) {
  const std::vector<double> x(1000, 0.1);
  const std::vector<double> y(999, 0.1);
  EXPECT_THROW(ComputeMcd(x, y), Error);
}

TEST(McdTest, Summary) {
  const McdReport r = SummarizeMcd({1.0, 2.0, 6.0});
  EXPECT_EQ(r.count, 3u);
  EXPECT_DOUBLE_EQ(r.mean, 3.0);
  EXPECT_EQ(SummarizeMcd({}).mean, 0.0);
}

}  // namespace
}  // namespace advdf
