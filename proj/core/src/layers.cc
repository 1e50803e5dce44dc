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

#include "advdf/layers.h"

#include <algorithm>
#include <string>

#include "advdf/common.h"

namespace advdf::nn {
namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

void AccumulateRowSums(const std::vector<double>& g, int rows, int cols, double* out) {
  for (int r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) sum += g[std::size_t(r) * cols + c];
    out[r] += sum;
  }
}

void CheckParams(std::span<const double> params, int expected, const char* layer) {
  Check(params.size() == static_cast<std::size_t>(expected),
        ErrorCode::kShapeMismatch,
        std::string(layer) + " expects " + std::to_string(expected) +
            " parameters, got " + std::to_string(params.size()));
}

}  // namespace

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, int padding)
    : in_(in_channels), out_(out_channels), k_(kernel), pad_(padding) {}

Tensor Conv2d::Forward(std::span<const double> params, const Tensor& x,
                       Cache* cache) const {
  CheckParams(params, ParameterCount(), "Conv2d");
  Check(x.channels == in_, ErrorCode::kShapeMismatch, "Conv2d input channels");
  const int out_h = x.height + 2 * pad_ - k_ + 1;
  const int out_w = x.width + 2 * pad_ - k_ + 1;
  Check(out_h > 0 && out_w > 0, ErrorCode::kShapeMismatch, "Conv2d input too small");

  Matrix cols = Matrix::Zero(in_ * k_ * k_, out_h * out_w);
  for (int c = 0; c < in_; ++c) {
    for (int ky = 0; ky < k_; ++ky) {
      for (int kx = 0; kx < k_; ++kx) {
        double* row = cols.row((c * k_ + ky) * k_ + kx).data();
        for (int y = 0; y < out_h; ++y) {
          const int iy = y + ky - pad_;
          if (iy < 0 || iy >= x.height) continue;
          const int x_lo = std::max(0, pad_ - kx);
          const int x_hi = std::min(out_w, x.width + pad_ - kx);
          const double* src = &x.data[c * x.plane() + std::size_t(iy) * x.width];
          for (int ox = x_lo; ox < x_hi; ++ox) {
            row[y * out_w + ox] = src[ox + kx - pad_];
          }
        }
      }
    }
  }

  const int n_weights = out_ * in_ * k_ * k_;
  ConstMatrixMap weights(params.data(), out_, in_ * k_ * k_);
  ConstVectorMap bias(params.data() + n_weights, out_);
  Tensor out(out_, out_h, out_w);
  MatrixMap y(out.data.data(), out_, out_h * out_w);
  y.noalias() = weights * cols;
  y.colwise() += bias;

  if (cache != nullptr) {
    cache->cols = std::move(cols);
    cache->in_height = x.height;
    cache->in_width = x.width;
  }
  return out;
}

Tensor Conv2d::Backward(std::span<const double> params, const Cache& cache,
                        const Tensor& grad_out, std::span<double> param_grad,
                        bool want_input_grad) const {
  CheckParams(params, ParameterCount(), "Conv2d");
  if (!param_grad.empty()) {
    CheckParams(param_grad, ParameterCount(), "Conv2d gradient");
  }
  const int positions = grad_out.height * grad_out.width;
  Check(grad_out.channels == out_ && cache.cols.cols() == positions,
        ErrorCode::kShapeMismatch, "Conv2d cotangent shape");

  const int n_weights = out_ * in_ * k_ * k_;
  ConstMatrixMap g(grad_out.data.data(), out_, positions);
  if (!param_grad.empty()) {
    MatrixMap d_weights(param_grad.data(), out_, in_ * k_ * k_);
    d_weights.noalias() += g * cache.cols.transpose();
    AccumulateRowSums(grad_out.data, out_, positions, param_grad.data() + n_weights);
  }

  if (!want_input_grad) return {};
  ConstMatrixMap weights(params.data(), out_, in_ * k_ * k_);
  const Matrix d_cols = weights.transpose() * g;
  Tensor dx(in_, cache.in_height, cache.in_width);
  const int out_w = grad_out.width;
  for (int c = 0; c < in_; ++c) {
    for (int ky = 0; ky < k_; ++ky) {
      for (int kx = 0; kx < k_; ++kx) {
        const double* row = d_cols.row((c * k_ + ky) * k_ + kx).data();
        for (int y = 0; y < grad_out.height; ++y) {
          const int iy = y + ky - pad_;
          if (iy < 0 || iy >= dx.height) continue;
          const int x_lo = std::max(0, pad_ - kx);
          const int x_hi = std::min(out_w, dx.width + pad_ - kx);
          double* dst = &dx.data[c * dx.plane() + std::size_t(iy) * dx.width];
          for (int ox = x_lo; ox < x_hi; ++ox) {
            dst[ox + kx - pad_] += row[y * out_w + ox];
          }
        }
      }
    }
  }
  return dx;
}

Conv1d::Conv1d(int in_channels, int out_channels, int kernel, int stride)
    : in_(in_channels), out_(out_channels), k_(kernel), stride_(stride) {}

int Conv1d::OutputLength(int in_length) const {
  Check(in_length >= k_, ErrorCode::kShapeMismatch,
        "Conv1d input of length " + std::to_string(in_length) +
            " shorter than kernel " + std::to_string(k_));
  return (in_length - k_) / stride_ + 1;
}

Tensor Conv1d::Forward(std::span<const double> params, const Tensor& x,
                       Cache* cache) const {
  CheckParams(params, ParameterCount(), "Conv1d");
  Check(x.channels == in_ && x.height == 1, ErrorCode::kShapeMismatch,
        "Conv1d input shape");
  const int out_len = OutputLength(x.width);

  Matrix cols(in_ * k_, out_len);
  for (int c = 0; c < in_; ++c) {
    const double* src = &x.data[c * x.plane()];
    for (int k = 0; k < k_; ++k) {
      double* row = cols.row(c * k_ + k).data();
      for (int j = 0; j < out_len; ++j) row[j] = src[j * stride_ + k];
    }
  }

  ConstMatrixMap weights(params.data(), out_, in_ * k_);
  ConstVectorMap bias(params.data() + out_ * in_ * k_, out_);
  Tensor out(out_, 1, out_len);
  MatrixMap y(out.data.data(), out_, out_len);
  y.noalias() = weights * cols;
  y.colwise() += bias;

  if (cache != nullptr) {
    cache->cols = std::move(cols);
    cache->in_length = x.width;
  }
  return out;
}

Tensor Conv1d::Backward(std::span<const double> params, const Cache& cache,
                        const Tensor& grad_out, std::span<double> param_grad,
                        bool want_input_grad) const {
  CheckParams(params, ParameterCount(), "Conv1d");
  if (!param_grad.empty()) {
    CheckParams(param_grad, ParameterCount(), "Conv1d gradient");
  }
  const int out_len = grad_out.width;
  Check(grad_out.channels == out_ && cache.cols.cols() == out_len,
        ErrorCode::kShapeMismatch, "Conv1d cotangent shape");

  ConstMatrixMap g(grad_out.data.data(), out_, out_len);
  if (!param_grad.empty()) {
    MatrixMap d_weights(param_grad.data(), out_, in_ * k_);
    d_weights.noalias() += g * cache.cols.transpose();
    AccumulateRowSums(grad_out.data, out_, out_len, param_grad.data() + out_ * in_ * k_);
  }

  if (!want_input_grad) return {};
  ConstMatrixMap weights(params.data(), out_, in_ * k_);
  const Matrix d_cols = weights.transpose() * g;
  Tensor dx(in_, 1, cache.in_length);
  for (int c = 0; c < in_; ++c) {
    double* dst = &dx.data[c * dx.plane()];
    for (int k = 0; k < k_; ++k) {
      const double* row = d_cols.row(c * k_ + k).data();
      for (int j = 0; j < out_len; ++j) dst[j * stride_ + k] += row[j];
    }
  }
  return dx;
}

Tensor MaxFeatureMap(const Tensor& x, MfmCache* cache) {
  Check(x.channels % 2 == 0, ErrorCode::kShapeMismatch,
        "max-feature-map needs an even channel count");
  const int half = x.channels / 2;
  const std::size_t n = half * x.plane();
  Tensor out(half, x.height, x.width);
  if (cache != nullptr) cache->upper_won.assign(n, 0);
  const double* lower = x.data.data();
  const double* upper = x.data.data() + n;
  for (std::size_t i = 0; i < n; ++i) {
    const bool take_upper = upper[i] > lower[i];
    out.data[i] = take_upper ? upper[i] : lower[i];
    if (cache != nullptr) cache->upper_won[i] = take_upper;
  }
  return out;
}

Tensor MaxFeatureMapBackward(const Shape& input, const MfmCache& cache,
                             const Tensor& grad_out) {
  Tensor dx(input.channels, input.height, input.width);
  const std::size_t n = grad_out.data.size();
  Check(n == cache.upper_won.size() && 2 * n == dx.data.size(),
        ErrorCode::kShapeMismatch, "max-feature-map cotangent shape");
  for (std::size_t i = 0; i < n; ++i) {
    dx.data[cache.upper_won[i] ? n + i : i] = grad_out.data[i];
  }
  return dx;
}

Tensor MaxPool2x2(const Tensor& x, PoolCache* cache) {
  const int out_h = x.height / 2;
  const int out_w = x.width / 2;
  Check(out_h > 0 && out_w > 0, ErrorCode::kShapeMismatch, "pool input too small");
  Tensor out(x.channels, out_h, out_w);
  if (cache != nullptr) cache->argmax.resize(out.data.size());
  std::size_t o = 0;
  for (int c = 0; c < x.channels; ++c) {
    const std::size_t base = c * x.plane();
    for (int y = 0; y < out_h; ++y) {
      for (int xx = 0; xx < out_w; ++xx, ++o) {
        std::size_t best = base + std::size_t(2 * y) * x.width + 2 * xx;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t idx = base + std::size_t(2 * y + dy) * x.width + 2 * xx + dx;
            if (x.data[idx] > x.data[best]) best = idx;
          }
        }
        out.data[o] = x.data[best];
        if (cache != nullptr) cache->argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return out;
}

Tensor MaxPool2x2Backward(const Shape& input, const PoolCache& cache,
                          const Tensor& grad_out) {
  Check(grad_out.data.size() == cache.argmax.size(), ErrorCode::kShapeMismatch,
        "pool cotangent shape");
  Tensor dx(input.channels, input.height, input.width);
  for (std::size_t i = 0; i < cache.argmax.size(); ++i) {
    dx.data[cache.argmax[i]] += grad_out.data[i];
  }
  return dx;
}

Tensor Relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor ReluBackward(const Tensor& input, const Tensor& grad_out) {
  Check(input.SameShape(grad_out), ErrorCode::kShapeMismatch, "relu cotangent shape");
  Tensor dx = grad_out;
  for (std::size_t i = 0; i < dx.data.size(); ++i) {
    if (!(input.data[i] > 0.0)) dx.data[i] = 0.0;
  }
  return dx;
}

std::vector<double> GlobalAvgPool(const Tensor& x) {
  std::vector<double> out(x.channels);
  const std::size_t plane = x.plane();
  for (int c = 0; c < x.channels; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < plane; ++i) sum += x.data[c * plane + i];
    out[c] = sum / static_cast<double>(plane);
  }
  return out;
}

Tensor GlobalAvgPoolBackward(const Shape& input,
                             std::span<const double> grad_out) {
  Check(grad_out.size() == static_cast<std::size_t>(input.channels),
        ErrorCode::kShapeMismatch, "pool cotangent shape");
  Tensor dx(input.channels, input.height, input.width);
  const std::size_t plane = dx.plane();
  for (int c = 0; c < input.channels; ++c) {
    const double g = grad_out[c] / static_cast<double>(plane);
    std::fill_n(dx.data.begin() + c * plane, plane, g);
  }
  return dx;
}

double Dense(std::span<const double> params, std::span<const double> x) {
  CheckParams(params, static_cast<int>(x.size()) + 1, "Dense");
  double z = params[x.size()];
  for (std::size_t i = 0; i < x.size(); ++i) z += params[i] * x[i];
  return z;
}

std::vector<double> DenseBackward(std::span<const double> params,
                                  std::span<const double> x, double grad_out,
                                  std::span<double> param_grad) {
  CheckParams(params, static_cast<int>(x.size()) + 1, "Dense");
  std::vector<double> dx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = grad_out * params[i];
  if (param_grad.empty()) return dx;
  CheckParams(param_grad, static_cast<int>(x.size()) + 1, "Dense gradient");
  for (std::size_t i = 0; i < x.size(); ++i) param_grad[i] += grad_out * x[i];
  param_grad[x.size()] += grad_out;
  return dx;
}

}  // namespace advdf::nn
