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

#ifndef ADVDF_LAYERS_H_
#define ADVDF_LAYERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "advdf/dsp.h"

// Minimal layer kit for the compact detectors. Every layer reads its weights
// from a caller-owned flat parameter span, so a whole model is one vector.
// Backward passes accumulate into parameter gradients (skipped when the span
// is empty) and return the input cotangent.
namespace advdf::nn {

using dsp::Matrix;

struct Shape {
  int channels = 0;
  int height = 1;
  int width = 0;
};

// Channel-major C x H x W activations (H = 1 for sequences).
struct Tensor {
  int channels = 0;
  int height = 1;
  int width = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c, int h, int w) : channels(c), height(h), width(w), data(std::size_t(c) * h * w, 0.0) {}

  Shape shape() const { return {channels, height, width}; }
  std::size_t plane() const { return std::size_t(height) * width; }
  double& at(int c, int y, int x) { return data[c * plane() + std::size_t(y) * width + x]; }
  double at(int c, int y, int x) const { return data[c * plane() + std::size_t(y) * width + x]; }
  bool SameShape(const Tensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

// Square-kernel 2-D convolution, stride 1, zero padding. Parameters: weights
// [out][in][ky][kx] then bias[out].
class Conv2d {
 public:
  Conv2d(int in_channels, int out_channels, int kernel, int padding);

  struct Cache {
    Matrix cols;  // (in * k * k) x (out_h * out_w)
    int in_height = 0;
    int in_width = 0;
  };

  int ParameterCount() const { return out_ * in_ * k_ * k_ + out_; }
  int fan_in() const { return in_ * k_ * k_; }
  Tensor Forward(std::span<const double> params, const Tensor& x, Cache* cache) const;
  Tensor Backward(std::span<const double> params, const Cache& cache,
                  const Tensor& grad_out, std::span<double> param_grad,
                  bool want_input_grad) const;

 private:
  int in_, out_, k_, pad_;
};

// 1-D convolution without padding. Parameters: weights [out][in][k] then
// bias[out].
class Conv1d {
 public:
  Conv1d(int in_channels, int out_channels, int kernel, int stride);

  struct Cache {
    Matrix cols;  // (in * k) x out_len
    int in_length = 0;
  };

  int ParameterCount() const { return out_ * in_ * k_ + out_; }
  int fan_in() const { return in_ * k_; }
  int kernel() const { return k_; }
  int stride() const { return stride_; }
  int OutputLength(int in_length) const;
  Tensor Forward(std::span<const double> params, const Tensor& x, Cache* cache) const;
  Tensor Backward(std::span<const double> params, const Cache& cache,
                  const Tensor& grad_out, std::span<double> param_grad,
                  bool want_input_grad) const;

 private:
  int in_, out_, k_, stride_;
};

// Max-feature-map: out[c] = max(in[c], in[c + C/2]). Ties go to the lower
// channel.
struct MfmCache {
  std::vector<std::uint8_t> upper_won;
};
Tensor MaxFeatureMap(const Tensor& x, MfmCache* cache);
Tensor MaxFeatureMapBackward(const Shape& input, const MfmCache& cache,
                             const Tensor& grad_out);

// 2x2 max pooling with stride 2; odd trailing rows/columns are dropped.
// Ties go to the first maximizer in row-major window order.
struct PoolCache {
  std::vector<std::uint32_t> argmax;
};
Tensor MaxPool2x2(const Tensor& x, PoolCache* cache);
Tensor MaxPool2x2Backward(const Shape& input, const PoolCache& cache,
                          const Tensor& grad_out);

Tensor Relu(const Tensor& x);
// Gradient passes where the forward input was strictly positive.
Tensor ReluBackward(const Tensor& input, const Tensor& grad_out);

// Mean over the spatial plane per channel.
std::vector<double> GlobalAvgPool(const Tensor& x);
Tensor GlobalAvgPoolBackward(const Shape& input,
                             std::span<const double> grad_out);

// Single-output affine head: weights[in] then bias.
double Dense(std::span<const double> params, std::span<const double> x);
// Returns input gradient; accumulates weight/bias gradients.
std::vector<double> DenseBackward(std::span<const double> params,
                                  std::span<const double> x, double grad_out,
                                  std::span<double> param_grad);

}  // namespace advdf::nn

#endif  // ADVDF_LAYERS_H_
