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

#include "advdf/models.h"

#include <cmath>
#include <limits>
#include <vector>

#include "advdf/audio.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace advdf {
namespace {

TEST(ModelShapeTest, ParameterCounts) {
  EXPECT_EQ(SpecNetLite::kParameterCount, 1337);
  EXPECT_EQ(RawNetLite::kParameterCount, 16497);
  EXPECT_EQ(MakeModel(ModelKind::kSpecNetLfcc)->ParameterCount(), 1337u);
  EXPECT_EQ(MakeModel(ModelKind::kSpecNetMfcc)->ParameterCount(), 1337u);
  EXPECT_EQ(MakeModel(ModelKind::kRawNet)->ParameterCount(), 16497u);
}

TEST(ModelShapeTest, RawNetStages) {
  const auto lengths = RawNetLite::Lengths(kStandardLength);
  EXPECT_EQ(lengths.a, 799);
  EXPECT_EQ(lengths.b, 198);
  EXPECT_EQ(lengths.c, 48);
  EXPECT_EQ(RawNetLite::CoveredSamples(kStandardLength), 63520u);
}

TEST(ModelNamesTest, RoundTrip) {
  for (ModelKind kind : {ModelKind::kSpecNetLfcc, ModelKind::kSpecNetMfcc,
                         ModelKind::kRawNet}) {
    EXPECT_EQ(ParseModelKind(ModelKindName(kind)), kind);
  }
  EXPECT_THROW(ParseModelKind("lcnn"), Error);
}

TEST(LossTest, BceValuesAndGradients) {
  EXPECT_NEAR(BceLoss(0.0, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(BceLoss(0.0, 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(BceLoss(3.0, 1), std::log1p(std::exp(-3.0)), 1e-15);
  EXPECT_NEAR(BceLoss(3.0, 0), 3.0 + std::log1p(std::exp(-3.0)), 1e-14);
  EXPECT_TRUE(std::isfinite(BceLoss(1000.0, 0)));
  EXPECT_NEAR(BceLoss(-1000.0, 1), 1000.0, 1e-9);
  EXPECT_DOUBLE_EQ(BceLossGrad(0.0, 1), -0.5);
  EXPECT_DOUBLE_EQ(BceLossGrad(0.0, 0), 0.5);
  // Far from the boundary the small gradient keeps its relative precision.
  EXPECT_NEAR(BceLossGrad(40.0, 1) / -std::exp(-40.0), 1.0, 1e-12);
  EXPECT_NEAR(BceLossGrad(-40.0, 0) / std::exp(-40.0), 1.0, 1e-12);
  for (double z : {-5.0, -0.3, 0.7, 4.0}) {
    for (int y : {0, 1}) {
      const double h = 1e-6;
      const double fd = (BceLoss(z + h, y) - BceLoss(z - h, y)) / (2 * h);
      EXPECT_NEAR(BceLossGrad(z, y), fd, 1e-8);
    }
  }
}

TEST(DecisionTest, PositiveLogitIsFake) {
  EXPECT_EQ(Decision(1e-12), 1);
  EXPECT_EQ(Decision(0.0), 0);
  EXPECT_EQ(Decision(-3.0), 0);
  EXPECT_NEAR(Sigmoid(0.0), 0.5, 1e-15);
  EXPECT_EQ(Sigmoid(-1000.0), 0.0);
}

// Golden values from an independent PyTorch float64 implementation.
TEST(SpecNetTest, MatchesReference) {
  SpecNetLite model;
  model.SetParams(oracle::SinusoidParams(1337, 0.2, 0.7, 0.3));
  const std::vector<double> x = oracle::ReferenceSignal();
  std::vector<double> dx(x.size());
  std::vector<double> dp(model.ParameterCount(), 0.0);
  const double logit = model.ForwardBackward(
      x, [](double) { return 1.0; }, dp, dx);
  EXPECT_NEAR(logit, 0.0026738718130371875, 1e-10);
  EXPECT_NEAR(model.Logit(x), logit, 1e-15);
  EXPECT_EQ(dx[0], 0.0);
  EXPECT_NEAR(dx[1000], -0.020870864642332027, 1e-9);
  EXPECT_NEAR(dx[32000], -0.004663247461432322, 1e-9);
  EXPECT_EQ(dx[63999], 0.0);
  EXPECT_NEAR(dp[0], -0.012413127583442329, 1e-9);
  EXPECT_NEAR(dp[100], 0.04160665040105462, 1e-9);
  EXPECT_NEAR(dp[500], -0.00038768926532048957, 1e-10);
  EXPECT_NEAR(dp[1336], 1.0, 1e-15);
}

TEST(RawNetTest, MatchesReference) {
  RawNetLite model;
  model.SetParams(oracle::SinusoidParams(16497, 0.05, 1.3, 0.2));
  const std::vector<double> x = oracle::ReferenceSignal();
  std::vector<double> dx(x.size());
  std::vector<double> dp(model.ParameterCount(), 0.0);
  const double logit = model.ForwardBackward(
      x, [](double) { return 1.0; }, dp, dx);
  EXPECT_NEAR(logit, 0.008188838680235106, 1e-12);
  EXPECT_NEAR(dx[0], 2.3794246749947294e-07, 1e-15);
  EXPECT_NEAR(dx[1000], -3.470913815998404e-07, 1e-15);
  EXPECT_NEAR(dx[32000], 4.314661792230473e-06, 1e-15);
  EXPECT_NEAR(dx[63519], -1.4509648344278335e-07, 1e-15);
  // Samples past the covered prefix never reach the logit.
  for (std::size_t i = 63520; i < x.size(); ++i) ASSERT_EQ(dx[i], 0.0);
  EXPECT_NEAR(dp[0], 6.173702106373873e-05, 1e-13);
  EXPECT_NEAR(dp[2570], 4.935773781080503e-05, 1e-13);
  EXPECT_NEAR(dp[2600], 0.00038406409783041623, 1e-12);
  EXPECT_NEAR(dp[16496], 1.0, 1e-15);
}

TEST(ModelTest, InitializationIsSeededAndBounded) {
  auto a = MakeModel(ModelKind::kSpecNetLfcc);
  auto b = MakeModel(ModelKind::kSpecNetLfcc);
  a->Initialize(5);
  b->Initialize(5);
  EXPECT_TRUE(std::equal(a->params().begin(), a->params().end(), b->params().begin()));
  b->Initialize(6);
  EXPECT_FALSE(std::equal(a->params().begin(), a->params().end(), b->params().begin()));
  // First layer fan-in is 9.
  for (int i = 0; i < SpecNetLite::kConv1Params; ++i) {
    EXPECT_LE(std::abs(a->params()[i]), 1.0 / 3.0);
  }
}

TEST(ModelTest, CloneIsIndependent) {
  auto a = MakeModel(ModelKind::kRawNet);
  a->Initialize(1);
  auto b = a->Clone();
  EXPECT_EQ(b->kind(), ModelKind::kRawNet);
  b->params()[0] += 1.0;
  EXPECT_NE(a->params()[0], b->params()[0]);
  EXPECT_THROW(a->SetParams(std::vector<double>(3)), Error);
}

TEST(ModelTest, LossGradientAgreesWithLogitGradient) {
  auto model = MakeModel(ModelKind::kRawNet);
  model->Initialize(2);
  const std::vector<double> x = oracle::ReferenceSignal();
  std::vector<double> logit_grad(x.size());
  std::vector<double> loss_grad(x.size());
  const double z = model->LogitGradient(x, logit_grad);
  model->LossAndGradients(x, 1, {}, loss_grad);
  const double scale = BceLossGrad(z, 1);
  for (std::size_t i = 0; i < x.size(); i += 1001) {
    EXPECT_NEAR(loss_grad[i], scale * logit_grad[i], 1e-15);
  }
}

TEST(ModelGradientTest, MatchesFiniteDifferences) {
  int models = 0;
  for (const auto& r : oracle::RunGradientChecks(2, 23)) {
    if (r.name == "specnet-lfcc" || r.name == "rawnet") {
      ++models;
      EXPECT_LT(r.worst_relative_error, 1e-4) << r.name;
    }
  }
  EXPECT_EQ(models, 2);
}

}  // namespace
}  // namespace advdf
