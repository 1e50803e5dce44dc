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

#ifndef ADVDF_MODELS_H_
#define ADVDF_MODELS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "advdf/dsp.h"
#include "advdf/layers.h"

namespace advdf {

// A binary detector that is differentiable with respect to its waveform
// input. Positive logits mean "fake". Attacks see only this interface.
class Detector {
 public:
  virtual ~Detector() = default;

  virtual double Logit(std::span<const double> waveform) const = 0;

  // Returns the logit and writes d logit / d waveform into `grad`.
  virtual double LogitGradient(std::span<const double> waveform,
                               std::span<double> grad) const = 0;
};

// 1 when the logit calls the input fake.
inline int Decision(double logit) { return logit > 0.0 ? 1 : 0; }

double Sigmoid(double z);

// softplus(z) - label * z.
double BceLoss(double logit, int label);
// sigmoid(z) - label.
double BceLossGrad(double logit, int label);

enum class ModelKind { kSpecNetLfcc, kSpecNetMfcc, kRawNet };

std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);

// A detector whose parameters live in one flat vector.
class Model : public Detector {
 public:
  explicit Model(ModelKind kind, std::size_t parameter_count)
      : kind_(kind), params_(parameter_count, 0.0) {}

  ModelKind kind() const { return kind_; }
  std::size_t ParameterCount() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  void SetParams(std::span<const double> params);

  // Uniform in +-1/sqrt(fan_in) per layer (weights and biases).
  virtual void Initialize(std::uint64_t seed) = 0;

  // Forward pass, then backpropagates upstream(logit) = dL/dlogit.
  // Parameter gradients are accumulated into `param_grad` when non-empty;
  // the waveform gradient is written into `input_grad` when non-empty.
  virtual double ForwardBackward(std::span<const double> waveform,
                                 const std::function<double(double)>& upstream,
                                 std::span<double> param_grad,
                                 std::span<double> input_grad) const = 0;

  // Returns the BCE loss; accumulates parameter gradients and writes the
  // waveform gradient of the loss when the spans are non-empty.
  double LossAndGradients(std::span<const double> waveform, int label,
                          std::span<double> param_grad,
                          std::span<double> input_grad) const;

  double LogitGradient(std::span<const double> waveform,
                       std::span<double> grad) const override;

  virtual std::unique_ptr<Model> Clone() const = 0;

 private:
  ModelKind kind_;
  std::vector<double> params_;
};

// LCNN-style spectral detector over the 398 x 80 cepstral plane:
// conv3x3(1->16) -> MFM -> pool -> conv3x3(8->16) -> MFM -> pool -> GAP ->
// affine(8->1).
class SpecNetLite : public Model {
 public:
  static constexpr int kConv1Params = 160;
  static constexpr int kConv2Params = 1168;
  static constexpr int kHeadParams = 9;
  static constexpr int kParameterCount = kConv1Params + kConv2Params + kHeadParams;

  explicit SpecNetLite(dsp::FeatureKind front_end = dsp::FeatureKind::kLfcc);

  void Initialize(std::uint64_t seed) override;

  dsp::FeatureMatrix Features(std::span<const double> waveform,
                              dsp::FrontEndCache* cache = nullptr) const;

  double LogitFromFeatures(const dsp::FeatureMatrix& features) const;

  // Backpropagates `dlogit` through the network. Parameter gradients are
  // accumulated when `param_grad` is non-empty; returns the feature
  // cotangent when `feature_grad` is non-null.
  double FeaturesBackward(const dsp::FeatureMatrix& features,
                          const std::function<double(double)>& upstream,
                          std::span<double> param_grad,
                          dsp::Matrix* feature_grad) const;

  double Logit(std::span<const double> waveform) const override;
  double ForwardBackward(std::span<const double> waveform,
                         const std::function<double(double)>& upstream,
                         std::span<double> param_grad,
                         std::span<double> input_grad) const override;
  std::unique_ptr<Model> Clone() const override;

  const dsp::CepstralFrontEnd& front_end() const { return front_end_; }

 private:
  dsp::CepstralFrontEnd front_end_;
  nn::Conv2d conv1_{1, 16, 3, 1};
  nn::Conv2d conv2_{8, 16, 3, 1};
};

// Raw-waveform detector: conv1d(1->16, k160, s80) -> ReLU -> conv1d(16->32,
// k9, s4) -> ReLU -> conv1d(32->32, k9, s4) -> ReLU -> GAP -> affine(32->1).
class RawNetLite : public Model {
 public:
  static constexpr int kConvAParams = 2576;
  static constexpr int kConvBParams = 4640;
  static constexpr int kConvCParams = 9248;
  static constexpr int kHeadParams = 33;
  static constexpr int kParameterCount =
      kConvAParams + kConvBParams + kConvCParams + kHeadParams;

  RawNetLite();

  void Initialize(std::uint64_t seed) override;

  struct StageLengths {
    int a = 0;
    int b = 0;
    int c = 0;
  };
  static StageLengths Lengths(std::size_t n_samples);

  // Number of leading samples that reach the logit; gradients past this
  // index are structurally zero.
  static std::size_t CoveredSamples(std::size_t n_samples);

  double Logit(std::span<const double> waveform) const override;
  double ForwardBackward(std::span<const double> waveform,
                         const std::function<double(double)>& upstream,
                         std::span<double> param_grad,
                         std::span<double> input_grad) const override;
  std::unique_ptr<Model> Clone() const override;

 private:
  nn::Conv1d conv_a_{1, 16, 160, 80};
  nn::Conv1d conv_b_{16, 32, 9, 4};
  nn::Conv1d conv_c_{32, 32, 9, 4};
};

std::unique_ptr<Model> MakeModel(ModelKind kind);

}  // namespace advdf

#endif  // ADVDF_MODELS_H_
