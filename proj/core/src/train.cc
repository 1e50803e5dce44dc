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

#include "advdf/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "advdf/common.h"

namespace advdf {

void TrainConfig::Validate() const {
  Check(learning_rate >= 0.0 && std::isfinite(learning_rate),
        ErrorCode::kInvalidArgument, "learning_rate must be >= 0");
  Check(batch_size > 0, ErrorCode::kInvalidArgument, "batch_size must be > 0");
  Check(epochs > 0, ErrorCode::kInvalidArgument, "epochs must be > 0");
  Check(weight_decay >= 0.0, ErrorCode::kInvalidArgument,
        "weight_decay must be >= 0");
}

AdamW::AdamW(std::size_t size, double learning_rate, double weight_decay,
             double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate),
      weight_decay_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      m_(size, 0.0),
      v_(size, 0.0) {}

void AdamW::Step(std::span<double> params, std::span<const double> grad) {
  Check(params.size() == m_.size() && grad.size() == m_.size(),
        ErrorCode::kShapeMismatch, "optimizer size mismatch");
  ++steps_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    params[i] -= learning_rate_ * weight_decay_ * params[i];
    params[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

ScoreSet ScoresByLabel(std::span<const double> logits,
                       std::span<const int> labels) {
  Check(logits.size() == labels.size(), ErrorCode::kShapeMismatch,
        "logit and label counts differ");
  ScoreSet scores;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    (labels[i] == 1 ? scores.fake : scores.bonafide).push_back(logits[i]);
  }
  return scores;
}

Evaluation Summarize(std::vector<double> logits, std::vector<int> labels) {
  Evaluation eval;
  std::vector<int> predictions(logits.size());
  std::transform(logits.begin(), logits.end(), predictions.begin(), Decision);
  eval.accuracy = Accuracy(predictions, labels);
  eval.eer = ComputeEer(ScoresByLabel(logits, labels));
  eval.logits = std::move(logits);
  eval.labels = std::move(labels);
  return eval;
}

Evaluation Evaluate(const Detector& detector, const Corpus& corpus) {
  std::vector<double> logits(corpus.size());
  std::vector<int> labels(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    logits[i] = detector.Logit(corpus.waveform(i).samples);
    labels[i] = static_cast<int>(corpus.label(i));
  }
  return Summarize(std::move(logits), std::move(labels));
}

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed,
                                    int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(MixSeed(seed, static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
  return order;
}

double BatchGradient(const Model& model,
                     std::span<const std::vector<double>> batch,
                     std::span<const int> labels, std::vector<double>& grad) {
  Check(!batch.empty() && batch.size() == labels.size(),
        ErrorCode::kShapeMismatch, "batch and label counts differ");
  grad.assign(model.ParameterCount(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    loss += model.LossAndGradients(batch[i], labels[i], grad, {});
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= scale;
  loss *= scale;
  Check(std::isfinite(loss), ErrorCode::kDivergence, "non-finite batch loss");
  return loss;
}

TrainResult Train(Model& model, const Corpus& train, const Corpus& valid,
                  const TrainConfig& config, const std::string& config_digest,
                  const EpochCallback& on_epoch) {
  config.Validate();
  Check(!train.empty(), ErrorCode::kEmptyInput, "empty training split");
  Check(!valid.empty(), ErrorCode::kEmptyInput, "empty validation split");

  AdamW optimizer(model.ParameterCount(), config.learning_rate,
                  config.weight_decay);
  TrainResult result;
  double best_accuracy = -1.0;
  std::vector<double> grad;
  std::vector<std::vector<double>> batch;
  std::vector<int> labels;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = EpochOrder(train.size(), config.seed, epoch);
    double loss_sum = 0.0;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      labels.clear();
      for (std::size_t j = start; j < end; ++j) {
        batch.push_back(train.waveform(order[j]).samples);
        labels.push_back(static_cast<int>(train.label(order[j])));
      }
      double loss = 0.0;
      try {
        loss = BatchGradient(model, batch, labels, grad);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivergence) throw;
        Fail(ErrorCode::kDivergence, "epoch " + std::to_string(epoch) +
                                         " batch " + std::to_string(n_batches) +
                                         ": non-finite loss");
      }
      optimizer.Step(model.params(), grad);
      loss_sum += loss;
      ++n_batches;
    }
    const Evaluation eval = Evaluate(model, valid);
    EpochRecord record{epoch, loss_sum / n_batches, eval.accuracy, eval.eer};
    result.history.push_back(record);
    if (eval.accuracy > best_accuracy) {
      best_accuracy = eval.accuracy;
      result.best = CheckpointFromModel(model, config.seed, epoch, config_digest);
    }
    if (on_epoch) on_epoch(record);
  }
  return result;
}

}  // namespace advdf
