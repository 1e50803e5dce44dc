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

#include <algorithm>
#include <cmath>
#include <string>

#include "advdf/common.h"

namespace advdf {
namespace {

using nn::Tensor;

void InitUniform(Rng& rng, std::span<double> block, int fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : block) v = rng.Uniform(-bound, bound);
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double BceLoss(double logit, int label) {
  // softplus(z) = max(z, 0) + log1p(exp(-|z|)).
  const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
  return softplus - label * logit;
}

double BceLossGrad(double logit, int label) {
  return label == 1 ? -Sigmoid(-logit) : Sigmoid(logit);
}

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSpecNetLfcc: return "specnet-lfcc";
    case ModelKind::kSpecNetMfcc: return "specnet-mfcc";
    case ModelKind::kRawNet: return "rawnet";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  for (ModelKind kind :
       {ModelKind::kSpecNetLfcc, ModelKind::kSpecNetMfcc, ModelKind::kRawNet}) {
    if (ModelKindName(kind) == name) return kind;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

void Model::SetParams(std::span<const double> params) {
  Check(params.size() == params_.size(), ErrorCode::kShapeMismatch,
        "expected " + std::to_string(params_.size()) + " parameters for " +
            std::string(ModelKindName(kind_)) + ", got " +
            std::to_string(params.size()));
  std::copy(params.begin(), params.end(), params_.begin());
}

double Model::LossAndGradients(std::span<const double> waveform, int label,
                               std::span<double> param_grad,
                               std::span<double> input_grad) const {
  Check(label == 0 || label == 1, ErrorCode::kInvalidArgument, "label must be 0 or 1");
  double logit = 0.0;
  ForwardBackward(
      waveform,
      [&](double z) {
        logit = z;
        return BceLossGrad(z, label);
      },
      param_grad, input_grad);
  return BceLoss(logit, label);
}

double Model::LogitGradient(std::span<const double> waveform,
                            std::span<double> grad) const {
  return ForwardBackward(waveform, [](double) { return 1.0; }, {}, grad);
}

SpecNetLite::SpecNetLite(dsp::FeatureKind front_end)
    : Model(front_end == dsp::FeatureKind::kLfcc ? ModelKind::kSpecNetLfcc
                                                 : ModelKind::kSpecNetMfcc,
            kParameterCount),
      front_end_(front_end == dsp::FeatureKind::kLfcc
                     ? dsp::CepstralFrontEnd::Lfcc()
                     : dsp::CepstralFrontEnd::Mfcc(80, 80)) {
  static_assert(kConv1Params == 16 * 1 * 9 + 16);
  static_assert(kConv2Params == 16 * 8 * 9 + 16);
  static_assert(kHeadParams == 8 + 1);
}

void SpecNetLite::Initialize(std::uint64_t seed) {
  Rng rng(seed);
  std::span<double> p = params();
  InitUniform(rng, p.subspan(0, kConv1Params), conv1_.fan_in());
  InitUniform(rng, p.subspan(kConv1Params, kConv2Params), conv2_.fan_in());
  InitUniform(rng, p.subspan(kConv1Params + kConv2Params, kHeadParams), 8);
}

dsp::FeatureMatrix SpecNetLite::Features(std::span<const double> waveform,
                                         dsp::FrontEndCache* cache) const {
  return front_end_.Compute(waveform, cache);
}

double SpecNetLite::LogitFromFeatures(const dsp::FeatureMatrix& features) const {
  return FeaturesBackward(features, nullptr, {}, nullptr);
}

double SpecNetLite::FeaturesBackward(const dsp::FeatureMatrix& features,
                                     const std::function<double(double)>& upstream,
                                     std::span<double> param_grad,
                                     dsp::Matrix* feature_grad) const {
  Check(features.values.cols() == front_end_.n_coeffs() && features.values.rows() >= 4,
        ErrorCode::kShapeMismatch, "SpecNetLite expects a T x 80 feature matrix");
  if (!param_grad.empty()) {
    Check(param_grad.size() == ParameterCount(), ErrorCode::kShapeMismatch,
          "parameter gradient size");
  }
  const std::span<const double> p = params();
  const auto p_conv1 = p.subspan(0, kConv1Params);
  const auto p_conv2 = p.subspan(kConv1Params, kConv2Params);
  const auto p_head = p.subspan(kConv1Params + kConv2Params, kHeadParams);

  // The feature matrix is used directly as a one-channel time x coefficient
  // image.
  Tensor x0(1, static_cast<int>(features.values.rows()),
            static_cast<int>(features.values.cols()));
  std::copy_n(features.values.data(), x0.data.size(), x0.data.begin());

  nn::Conv2d::Cache conv1_cache;
  nn::MfmCache mfm1_cache;
  nn::PoolCache pool1_cache;
  nn::Conv2d::Cache conv2_cache;
  nn::MfmCache mfm2_cache;
  nn::PoolCache pool2_cache;

  const Tensor c1 = conv1_.Forward(p_conv1, x0, &conv1_cache);
  const Tensor m1 = nn::MaxFeatureMap(c1, &mfm1_cache);
  const Tensor p1 = nn::MaxPool2x2(m1, &pool1_cache);
  const Tensor c2 = conv2_.Forward(p_conv2, p1, &conv2_cache);
  const Tensor m2 = nn::MaxFeatureMap(c2, &mfm2_cache);
  const Tensor p2 = nn::MaxPool2x2(m2, &pool2_cache);
  const std::vector<double> pooled = nn::GlobalAvgPool(p2);
  const double logit = nn::Dense(p_head, pooled);
  if (!upstream) return logit;

  const double dlogit = upstream(logit);
  const bool want_features = feature_grad != nullptr;
  auto split = [&](std::size_t offset, std::size_t count) {
    return param_grad.empty() ? std::span<double>() : param_grad.subspan(offset, count);
  };
  const std::vector<double> d_pooled =
      nn::DenseBackward(p_head, pooled, dlogit, split(kConv1Params + kConv2Params, kHeadParams));
  Tensor g = nn::GlobalAvgPoolBackward(p2.shape(), d_pooled);
  g = nn::MaxPool2x2Backward(m2.shape(), pool2_cache, g);
  g = nn::MaxFeatureMapBackward(c2.shape(), mfm2_cache, g);
  g = conv2_.Backward(p_conv2, conv2_cache, g, split(kConv1Params, kConv2Params), true);
  g = nn::MaxPool2x2Backward(m1.shape(), pool1_cache, g);
  g = nn::MaxFeatureMapBackward(c1.shape(), mfm1_cache, g);
  g = conv1_.Backward(p_conv1, conv1_cache, g, split(0, kConv1Params), want_features);
  if (want_features) {
    *feature_grad = dsp::Matrix(features.values.rows(), features.values.cols());
    std::copy(g.data.begin(), g.data.end(), feature_grad->data());
  }
  return logit;
}

double SpecNetLite::Logit(std::span<const double> waveform) const {
  return LogitFromFeatures(Features(waveform));
}

double SpecNetLite::ForwardBackward(std::span<const double> waveform,
                                    const std::function<double(double)>& upstream,
                                    std::span<double> param_grad,
                                    std::span<double> input_grad) const {
  const bool want_input = !input_grad.empty();
  if (want_input) {
    Check(input_grad.size() == waveform.size(), ErrorCode::kShapeMismatch,
          "input gradient size");
  }
  dsp::FrontEndCache cache;
  const dsp::FeatureMatrix features = Features(waveform, want_input ? &cache : nullptr);
  dsp::Matrix feature_grad;
  const double logit = FeaturesBackward(features, upstream, param_grad,
                                        want_input ? &feature_grad : nullptr);
  if (want_input) {
    const std::vector<double> g = front_end_.Vjp(cache, feature_grad);
    std::copy(g.begin(), g.end(), input_grad.begin());
  }
  return logit;
}

std::unique_ptr<Model> SpecNetLite::Clone() const {
  return std::make_unique<SpecNetLite>(*this);
}

RawNetLite::RawNetLite() : Model(ModelKind::kRawNet, kParameterCount) {
  static_assert(kConvAParams == 16 * 160 + 16);
  static_assert(kConvBParams == 32 * 16 * 9 + 32);
  static_assert(kConvCParams == 32 * 32 * 9 + 32);
  static_assert(kHeadParams == 32 + 1);
}

void RawNetLite::Initialize(std::uint64_t seed) {
  Rng rng(seed);
  std::span<double> p = params();
  std::size_t offset = 0;
  InitUniform(rng, p.subspan(offset, kConvAParams), conv_a_.fan_in());
  offset += kConvAParams;
  InitUniform(rng, p.subspan(offset, kConvBParams), conv_b_.fan_in());
  offset += kConvBParams;
  InitUniform(rng, p.subspan(offset, kConvCParams), conv_c_.fan_in());
  offset += kConvCParams;
  InitUniform(rng, p.subspan(offset, kHeadParams), 32);
}

RawNetLite::StageLengths RawNetLite::Lengths(std::size_t n_samples) {
  const RawNetLite shape;
  StageLengths lengths;
  lengths.a = shape.conv_a_.OutputLength(static_cast<int>(n_samples));
  lengths.b = shape.conv_b_.OutputLength(lengths.a);
  lengths.c = shape.conv_c_.OutputLength(lengths.b);
  return lengths;
}

std::size_t RawNetLite::CoveredSamples(std::size_t n_samples) {
  const StageLengths lengths = Lengths(n_samples);
  const RawNetLite shape;
  const auto reach = [](int used_outputs, const nn::Conv1d& conv) {
    return (used_outputs - 1) * conv.stride() + conv.kernel();
  };
  const int used_b = reach(lengths.c, shape.conv_c_);
  const int used_a = reach(used_b, shape.conv_b_);
  return static_cast<std::size_t>(reach(used_a, shape.conv_a_));
}

double RawNetLite::Logit(std::span<const double> waveform) const {
  return ForwardBackward(waveform, nullptr, {}, {});
}

double RawNetLite::ForwardBackward(std::span<const double> waveform,
                                   const std::function<double(double)>& upstream,
                                   std::span<double> param_grad,
                                   std::span<double> input_grad) const {
  if (!param_grad.empty()) {
    Check(param_grad.size() == ParameterCount(), ErrorCode::kShapeMismatch,
          "parameter gradient size");
  }
  const bool want_input = !input_grad.empty();
  if (want_input) {
    Check(input_grad.size() == waveform.size(), ErrorCode::kShapeMismatch,
          "input gradient size");
  }
  const std::span<const double> p = params();
  const std::size_t off_b = kConvAParams;
  const std::size_t off_c = off_b + kConvBParams;
  const std::size_t off_head = off_c + kConvCParams;

  Tensor x0(1, 1, static_cast<int>(waveform.size()));
  std::copy(waveform.begin(), waveform.end(), x0.data.begin());

  nn::Conv1d::Cache cache_a, cache_b, cache_c;
  const Tensor a = conv_a_.Forward(p.subspan(0, kConvAParams), x0, &cache_a);
  const Tensor ra = nn::Relu(a);
  const Tensor b = conv_b_.Forward(p.subspan(off_b, kConvBParams), ra, &cache_b);
  const Tensor rb = nn::Relu(b);
  const Tensor c = conv_c_.Forward(p.subspan(off_c, kConvCParams), rb, &cache_c);
  const Tensor rc = nn::Relu(c);
  const std::vector<double> pooled = nn::GlobalAvgPool(rc);
  const double logit = nn::Dense(p.subspan(off_head, kHeadParams), pooled);
  if (!upstream) return logit;

  auto split = [&](std::size_t offset, std::size_t count) {
    return param_grad.empty() ? std::span<double>() : param_grad.subspan(offset, count);
  };
  const double dlogit = upstream(logit);
  const std::vector<double> d_pooled = nn::DenseBackward(
      p.subspan(off_head, kHeadParams), pooled, dlogit, split(off_head, kHeadParams));
  Tensor g = nn::GlobalAvgPoolBackward(rc.shape(), d_pooled);
  g = nn::ReluBackward(c, g);
  g = conv_c_.Backward(p.subspan(off_c, kConvCParams), cache_c, g, split(off_c, kConvCParams), true);
  g = nn::ReluBackward(b, g);
  g = conv_b_.Backward(p.subspan(off_b, kConvBParams), cache_b, g, split(off_b, kConvBParams), true);
  g = nn::ReluBackward(a, g);
  g = conv_a_.Backward(p.subspan(0, kConvAParams), cache_a, g, split(0, kConvAParams), want_input);
  if (want_input) std::copy(g.data.begin(), g.data.end(), input_grad.begin());
  return logit;
}

std::unique_ptr<Model> RawNetLite::Clone() const {
  return std::make_unique<RawNetLite>(*this);
}

std::unique_ptr<Model> MakeModel(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSpecNetLfcc:
      return std::make_unique<SpecNetLite>(dsp::FeatureKind::kLfcc);
    case ModelKind::kSpecNetMfcc:
      return std::make_unique<SpecNetLite>(dsp::FeatureKind::kMfcc);
    case ModelKind::kRawNet:
      return std::make_unique<RawNetLite>();
  }
  Fail(ErrorCode::kInvalidArgument, "unknown model kind");
}

}  // namespace advdf
