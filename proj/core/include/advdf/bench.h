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

#ifndef ADVDF_BENCH_H_
#define ADVDF_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "advdf/adaptive.h"
#include "advdf/attacks.h"
#include "advdf/corpus.h"
#include "advdf/models.h"
#include "advdf/synth.h"
#include "advdf/train.h"

namespace advdf::bench {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kResultHeader =
    "target_model,attack_model,attack,param,eer,mean_mcd,flipped_frac,n";

// Per-class caps on split sizes; 0 keeps everything.
struct SubsetSpec {
  int train_per_class = 0;
  int valid_per_class = 0;
  int test_per_class = 0;
};

struct AdaptiveSection {
  AdaptiveConfig config;
  ModelKind target = ModelKind::kSpecNetLfcc;
  // Caps applied during fine-tuning only.
  SubsetSpec subset;
};

struct RunConfig {
  std::uint64_t seed = 0;
  SynthSpec synth;
  std::filesystem::path manifest;     // dataset for every command but synth-data
  std::filesystem::path checkpoints;  // directory of <model>.ckpt files
  std::filesystem::path baseline;     // optional whitebox run reused by adv-train
  std::vector<ModelKind> models = {ModelKind::kSpecNetLfcc, ModelKind::kRawNet};
  TrainConfig train;
  std::vector<AttackSpec> grid;
  AdaptiveSection adaptive;
  SubsetSpec eval;
  bool mfcc_attacker = false;
  bool export_wav = false;

  // Canonical JSON; the digest hashes this text.
  std::string ToJson() const;
  std::string Digest() const;
};

// The default grids: FGSM eps {0.0005, 0.00075, 0.001}, PGD-L2 eps
// {0.1, 0.15, 0.2} and FAB eta {10, 20, 30}.
std::vector<AttackSpec> DefaultGrid();
// The strongest setting of each kind in DefaultGrid().
std::vector<AttackSpec> StrongestRoster();

// Parses a JSON config. Relative paths resolve against `base_dir`.
RunConfig ParseRunConfig(std::string_view json,
                         const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);

struct ResultRow {
  std::string target_model;
  std::string attack_model;
  AttackKind attack = AttackKind::kNone;
  double param = 0.0;
  double eer = 0.0;
  double mean_mcd = 0.0;
  double flipped_frac = 0.0;
  std::size_t n = 0;
};

std::string FormatResultCsv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> ParseResultCsv(std::string_view text);

struct RunOptions {
  std::filesystem::path out_dir;
  bool force = false;
  std::ostream* log = nullptr;
};

// Creates `out_dir`, refusing a non-empty one unless `force` is set.
void PrepareRunDir(const std::filesystem::path& out_dir, bool force);

// Each command writes into options.out_dir and records the config digest
// and seed in run.json plus a <name>.meta.json next to every CSV.
std::vector<ManifestRecord> CmdSynthData(const RunConfig& config,
                                         const RunOptions& options);
// Trains every configured model (plus the MFCC attacker when enabled) and
// returns the clean test rows.
std::vector<ResultRow> CmdTrain(const RunConfig& config, const RunOptions& options);
std::vector<ResultRow> CmdWhitebox(const RunConfig& config,
                                   const RunOptions& options);
std::vector<ResultRow> CmdTransfer(const RunConfig& config,
                                   const RunOptions& options);

struct AdvTrainResult {
  std::vector<ResultRow> before;    // white-box rows of the baseline target
  std::vector<ResultRow> after;     // white-box rows of the fine-tuned target
  std::vector<ResultRow> transfer;  // other models attacking the fine-tuned one
  AdaptiveResult adaptive;
};
AdvTrainResult CmdAdvTrain(const RunConfig& config, const RunOptions& options);

// Merges the result CSVs of `run_dirs` into report.csv and report.md.
std::vector<ResultRow> CmdReport(const std::vector<std::filesystem::path>& run_dirs,
                                 const RunOptions& options);

// Recomputes every row of <run_dir>/<name>.csv from the persisted
// per-sample scores; returns the largest absolute EER difference.
double RecomputeEerGap(const std::filesystem::path& run_dir, std::string_view name);

// One attacker paired with the targets that evaluate its adversarials.
struct MatrixEntry {
  std::string attacker_name;
  const Model* attacker = nullptr;
  std::vector<std::pair<std::string, const Model*>> targets;
};

// Crafts each grid attack once per attacker and scores it on every paired
// target. When `scores_dir` is set, per-sample JSONL records are written
// there. Rows come out in entry, target, grid order; a NONE setting in the
// grid yields the clean row.
std::vector<ResultRow> RunAttackMatrix(const std::vector<MatrixEntry>& entries,
                                       const std::vector<AttackSpec>& grid,
                                       const Corpus& corpus,
                                       const std::filesystem::path& scores_dir,
                                       std::ostream* log = nullptr);

// Loads the manifest split with per-class cap (0 = all); the train split is
// class-balanced by oversampling first.
Corpus LoadSplit(const RunConfig& config, Split split, int per_class_cap);

}  // namespace advdf::bench

#endif  // ADVDF_BENCH_H_
