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

#ifndef ADVDF_TRAIN_H_
#define ADVDF_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "advdf/checkpoint.h"
#include "advdf/corpus.h"
#include "advdf/metrics.h"
#include "advdf/models.h"

namespace advdf {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 10;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Adam with decoupled weight decay.
class AdamW {
 public:
  AdamW(std::size_t size, double learning_rate, double weight_decay,
        double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void Step(std::span<double> params, std::span<const double> grad);

  long steps() const { return steps_; }

 private:
  double learning_rate_;
  double weight_decay_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long steps_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// Per-utterance logits and labels for a corpus.
struct Evaluation {
  std::vector<double> logits;
  std::vector<int> labels;
  double accuracy = 0.0;
  double eer = 0.0;
};

ScoreSet ScoresByLabel(std::span<const double> logits,
                       std::span<const int> labels);
Evaluation Summarize(std::vector<double> logits, std::vector<int> labels);
Evaluation Evaluate(const Detector& detector, const Corpus& corpus);

// Order of a training epoch: a Fisher-Yates shuffle seeded from
// MixSeed(seed, epoch).
std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed,
                                    int epoch);

// Averages per-sample BCE gradients over `batch` into `grad` (resized) and
// returns the mean loss. Throws kDivergence on a non-finite loss.
double BatchGradient(const Model& model, std::span<const std::vector<double>> batch,
                     std::span<const int> labels, std::vector<double>& grad);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_accuracy = 0.0;
  double valid_eer = 0.0;
};

struct TrainResult {
  Checkpoint best;  // highest validation accuracy, earliest on ties
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains `model` in place from its current parameters. On return the model
// holds the final-epoch parameters; the best checkpoint is in the result.
TrainResult Train(Model& model, const Corpus& train, const Corpus& valid,
                  const TrainConfig& config, const std::string& config_digest,
                  const EpochCallback& on_epoch = {});

}  // namespace advdf

#endif  // ADVDF_TRAIN_H_
