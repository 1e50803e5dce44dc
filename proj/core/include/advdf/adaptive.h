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

#ifndef ADVDF_ADAPTIVE_H_
#define ADVDF_ADAPTIVE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "advdf/attacks.h"
#include "advdf/checkpoint.h"
#include "advdf/common.h"
#include "advdf/corpus.h"
#include "advdf/train.h"

namespace advdf {

struct AdaptiveConfig {
  double clip = 1.0;
  double momentum = 0.2;
  double non_attack = 1.0 / 3.0;
  std::vector<AttackSpec> roster;
  int epochs = 10;

  void Validate() const;
  std::size_t n_attacks() const { return roster.size(); }
};

// Entry 0 is "no attack"; entry i > 0 is roster[i - 1].
using SamplingVector = std::vector<double>;

SamplingVector InitialSamplingVector(std::size_t n_attacks);

// One weight update driven by the loss observed under scenario `index`:
// w_i <- m * min(loss, c) + (1 - m) * w_i, then every entry becomes
// 0.5 * w_k / sum(w) + 0.5 * r_k with r_0 = p and r_k = (1 - p) / N.
SamplingVector AdaptiveUpdate(std::span<const double> w, double loss,
                              std::size_t index, double clip, double momentum,
                              double non_attack);
SamplingVector AdaptiveUpdate(std::span<const double> w, double loss,
                              std::size_t index, const AdaptiveConfig& config);

// Categorical draw with probabilities w.
std::size_t SampleIndex(std::span<const double> w, Rng& rng);

// (N + 1) * prod(a) / sum(a); 0 when the sum is 0.
double EpochScore(std::span<const double> accuracies);

// Index of the highest score, earliest on ties.
std::size_t SelectEpoch(std::span<const double> scores);

struct AdaptiveEpoch {
  int epoch = 0;  // 1-based
  SamplingVector w_snapshot;
  std::vector<double> accuracies;  // clean first, then the roster order
  double clean_eer = 0.0;
  std::vector<double> attacked_eers;
  double score = 0.0;
  double train_loss = 0.0;
  Checkpoint checkpoint;
};

struct AdaptiveResult {
  Checkpoint selected;
  std::size_t selected_index = 0;  // into history
  std::vector<AdaptiveEpoch> history;
  long batches = 0;
  long fallback_batches = 0;
};

using AdaptiveEpochCallback = std::function<void(const AdaptiveEpoch&)>;

// Fine-tunes a copy of `base`. Each batch draws a scenario from w; attacked
// batches are crafted white-box against the current model. Training uses
// the learning rate, batch size, weight decay and seed of `train_config`.
// A batch whose attack fails trains on clean audio instead; more than 1% of
// such batches aborts with kDivergence.
AdaptiveResult AdvFinetune(const Model& base, const AdaptiveConfig& config,
                           const TrainConfig& train_config, const Corpus& train,
                           const Corpus& valid, const std::string& config_digest,
                           const AdaptiveEpochCallback& on_epoch = {});

// JSON object {epoch, w_snapshot, accuracies, clean_eer, attacked_eers,
// score, selected} on one line.
std::string HistoryJsonLine(const AdaptiveEpoch& epoch, bool selected);

}  // namespace advdf

#endif  // ADVDF_ADAPTIVE_H_
