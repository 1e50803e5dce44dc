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

#include "advdf/adaptive.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace advdf {
namespace {

constexpr std::uint64_t kOrderStream = 101;
constexpr std::uint64_t kScenarioStream = 102;

}  // namespace

void AdaptiveConfig::Validate() const {
  Check(clip > 0.0, ErrorCode::kInvalidArgument, "clip must be > 0");
  Check(momentum > 0.0 && momentum <= 1.0, ErrorCode::kInvalidArgument,
        "momentum must be in (0, 1]");
  Check(non_attack > 0.0 && non_attack < 1.0, ErrorCode::kInvalidArgument,
        "non_attack must be in (0, 1)");
  Check(!roster.empty(), ErrorCode::kInvalidArgument, "attack roster is empty");
  Check(epochs > 0, ErrorCode::kInvalidArgument, "epochs must be > 0");
  for (const AttackSpec& spec : roster) spec.Validate();
}

SamplingVector InitialSamplingVector(std::size_t n_attacks) {
  Check(n_attacks >= 1, ErrorCode::kInvalidArgument, "need at least one attack");
  return SamplingVector(n_attacks + 1, 1.0 / static_cast<double>(n_attacks + 1));
}

SamplingVector AdaptiveUpdate(std::span<const double> w, double loss,
                              std::size_t index, double clip, double momentum,
                              double non_attack) {
  Check(w.size() >= 2, ErrorCode::kInvalidArgument,
        "sampling vector needs at least two entries");
  Check(index < w.size(), ErrorCode::kIndexOutOfRange,
        "scenario index out of range");
  Check(std::isfinite(loss), ErrorCode::kNonFinite, "non-finite loss");
  Check(loss >= 0.0, ErrorCode::kInvalidArgument, "loss must be >= 0");
  SamplingVector out(w.begin(), w.end());
  out[index] = momentum * std::min(loss, clip) + (1.0 - momentum) * out[index];
  double sum = 0.0;
  for (double v : out) sum += v;
  const double n_attacks = static_cast<double>(w.size() - 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double r = k == 0 ? non_attack : (1.0 - non_attack) / n_attacks;
    out[k] = 0.5 * out[k] / sum + 0.5 * r;
  }
  return out;
}

SamplingVector AdaptiveUpdate(std::span<const double> w, double loss,
                              std::size_t index, const AdaptiveConfig& config) {
  return AdaptiveUpdate(w, loss, index, config.clip, config.momentum,
                        config.non_attack);
}

std::size_t SampleIndex(std::span<const double> w, Rng& rng) {
  Check(!w.empty(), ErrorCode::kEmptyInput, "empty sampling vector");
  double total = 0.0;
  for (double v : w) total += v;
  const double u = rng.Uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    cumulative += w[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

double EpochScore(std::span<const double> accuracies) {
  Check(!accuracies.empty(), ErrorCode::kEmptyInput, "no accuracies");
  double product = 1.0;
  double sum = 0.0;
  for (double a : accuracies) {
    Check(a >= 0.0 && a <= 1.0, ErrorCode::kInvalidArgument,
          "accuracy outside [0, 1]");
    product *= a;
    sum += a;
  }
  if (sum == 0.0) return 0.0;
  return static_cast<double>(accuracies.size()) * product / sum;
}

std::size_t SelectEpoch(std::span<const double> scores) {
  Check(!scores.empty(), ErrorCode::kEmptyInput, "empty epoch history");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

AdaptiveResult AdvFinetune(const Model& base, const AdaptiveConfig& config,
                           const TrainConfig& train_config, const Corpus& train,
                           const Corpus& valid, const std::string& config_digest,
                           const AdaptiveEpochCallback& on_epoch) {
  config.Validate();
  train_config.Validate();
  Check(!train.empty(), ErrorCode::kEmptyInput, "empty training split");
  Check(!valid.empty(), ErrorCode::kEmptyInput, "empty validation split");

  std::unique_ptr<Model> model = base.Clone();
  AdamW optimizer(model->ParameterCount(), train_config.learning_rate,
                  train_config.weight_decay);
  Rng scenario_rng(MixSeed(train_config.seed, kScenarioStream));
  const std::uint64_t order_seed = MixSeed(train_config.seed, kOrderStream);
  const std::size_t batch_size = static_cast<std::size_t>(train_config.batch_size);
  const long batches_per_epoch =
      static_cast<long>((train.size() + batch_size - 1) / batch_size);
  const long planned_batches = batches_per_epoch * config.epochs;

  AdaptiveResult result;
  SamplingVector w = InitialSamplingVector(config.n_attacks());
  std::vector<double> grad;
  std::vector<std::vector<double>> batch;
  std::vector<int> labels;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = EpochOrder(train.size(), order_seed, epoch);
    double loss_sum = 0.0;
    long n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      const std::size_t scenario = SampleIndex(w, scenario_rng);
      batch.clear();
      labels.clear();
      for (std::size_t j = start; j < end; ++j) {
        batch.push_back(train.waveform(order[j]).samples);
        labels.push_back(static_cast<int>(train.label(order[j])));
      }
      if (scenario > 0) {
        const AttackSpec& spec = config.roster[scenario - 1];
        std::vector<std::vector<double>> attacked;
        attacked.reserve(batch.size());
        try {
          for (std::size_t j = 0; j < batch.size(); ++j) {
            attacked.push_back(
                RunAttack(*model, spec, batch[j], labels[j]).adversarial);
          }
          batch = std::move(attacked);
        } catch (const Error&) {
          ++result.fallback_batches;
          Check(static_cast<double>(result.fallback_batches) <=
                    0.01 * static_cast<double>(planned_batches),
                ErrorCode::kDivergence,
                "more than 1% of batches fell back to clean audio");
        }
      }
      try {
        BatchGradient(*model, batch, labels, grad);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivergence) throw;
        Fail(ErrorCode::kDivergence, "epoch " + std::to_string(epoch) +
                                         " batch " + std::to_string(n_batches) +
                                         ": non-finite loss");
      }
      optimizer.Step(model->params(), grad);
      // Post-step loss on the same batch.
      double loss = 0.0;
      for (std::size_t j = 0; j < batch.size(); ++j) {
        loss += model->LossAndGradients(batch[j], labels[j], {}, {});
      }
      loss /= static_cast<double>(batch.size());
      Check(std::isfinite(loss), ErrorCode::kDivergence,
            "epoch " + std::to_string(epoch) + " batch " +
                std::to_string(n_batches) + ": non-finite loss");
      w = AdaptiveUpdate(w, loss, scenario, config);
      loss_sum += loss;
      ++n_batches;
      ++result.batches;
    }

    AdaptiveEpoch record;
    record.epoch = epoch;
    record.w_snapshot = w;
    record.train_loss = loss_sum / static_cast<double>(n_batches);
    const Evaluation clean = Evaluate(*model, valid);
    record.accuracies.push_back(clean.accuracy);
    record.clean_eer = clean.eer;
    for (const AttackSpec& spec : config.roster) {
      std::vector<double> logits;
      std::vector<int> valid_labels;
      AttackDataset(*model, spec, valid, [&](const AttackRecord& attacked) {
        logits.push_back(model->Logit(attacked.outcome.adversarial));
        valid_labels.push_back(static_cast<int>(valid.label(attacked.index)));
      });
      const Evaluation eval = Summarize(std::move(logits), std::move(valid_labels));
      record.accuracies.push_back(eval.accuracy);
      record.attacked_eers.push_back(eval.eer);
    }
    record.score = EpochScore(record.accuracies);
    record.checkpoint =
        CheckpointFromModel(*model, train_config.seed, epoch, config_digest);
    result.history.push_back(record);
    if (on_epoch) on_epoch(result.history.back());
  }

  std::vector<double> scores;
  for (const AdaptiveEpoch& e : result.history) scores.push_back(e.score);
  result.selected_index = SelectEpoch(scores);
  result.selected = result.history[result.selected_index].checkpoint;
  return result;
}

std::string HistoryJsonLine(const AdaptiveEpoch& epoch, bool selected) {
  nlohmann::json line = {
      {"epoch", epoch.epoch},
      {"w_snapshot", epoch.w_snapshot},
      {"accuracies", epoch.accuracies},
      {"clean_eer", epoch.clean_eer},
      {"attacked_eers", epoch.attacked_eers},
      {"score", epoch.score},
      {"train_loss", epoch.train_loss},
      {"selected", selected},
  };
  return line.dump();
}

}  // namespace advdf
