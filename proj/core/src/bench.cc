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

#include "advdf/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "advdf/checkpoint.h"
#include "advdf/common.h"
#include "advdf/metrics.h"
#include "json.hpp"

namespace advdf::bench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kBalanceStream = 201;
constexpr std::uint64_t kModelStream = 300;

std::string Num(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.15g", v);
  return buffer;
}

std::string Param(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%g", v);
  return buffer;
}

void Log(const RunOptions& options, const std::string& line) {
  if (options.log != nullptr) *options.log << line << std::endl;
}

void Log(std::ostream* log, const std::string& line) {
  if (log != nullptr) *log << line << std::endl;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Check(out.good(), ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  Check(out.good(), ErrorCode::kIo, "short write to " + path.string());
}

json SpecJson(const AttackSpec& spec) {
  json j = {{"kind", AttackKindName(spec.kind)}};
  switch (spec.kind) {
    case AttackKind::kNone:
      break;
    case AttackKind::kFgsm:
      j["epsilon"] = spec.epsilon;
      break;
    case AttackKind::kPgdL2:
      j["epsilon"] = spec.epsilon;
      j["steps"] = spec.steps;
      break;
    case AttackKind::kFab:
      j["eta"] = spec.eta;
      j["steps"] = spec.steps;
      break;
  }
  return j;
}

AttackSpec SpecFromJson(const json& j) {
  AttackSpec spec;
  spec.kind = ParseAttackKind(j.at("kind").get<std::string>());
  spec.epsilon = j.value("epsilon", 0.0);
  spec.eta = j.value("eta", 10.0);
  spec.steps = j.value("steps", 10);
  spec.Validate();
  return spec;
}

json SubsetJson(const SubsetSpec& s) {
  return {{"train_per_class", s.train_per_class},
          {"valid_per_class", s.valid_per_class},
          {"test_per_class", s.test_per_class}};
}

SubsetSpec SubsetFromJson(const json& j) {
  SubsetSpec s;
  s.train_per_class = j.value("train_per_class", 0);
  s.valid_per_class = j.value("valid_per_class", 0);
  s.test_per_class = j.value("test_per_class", 0);
  Check(s.train_per_class >= 0 && s.valid_per_class >= 0 && s.test_per_class >= 0,
        ErrorCode::kInvalidArgument, "subset caps must be >= 0");
  return s;
}

void RejectUnknownKeys(const json& j, std::initializer_list<std::string_view> known,
                       const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::find(known.begin(), known.end(), key) != known.end();
    Check(ok, ErrorCode::kInvalidArgument,
          "unknown key '" + key + "' in " + where);
  }
}

fs::path Resolve(const fs::path& base, const std::string& text) {
  if (text.empty()) return {};
  const fs::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void WriteMeta(const fs::path& out_dir, const std::string& name,
               const RunConfig& config, const std::string& command) {
  json meta = {{"schema_version", kSchemaVersion},
               {"config_digest", config.Digest()},
               {"seed", config.seed},
               {"command", command},
               {"file", name}};
  WriteFile(out_dir / (name + ".meta.json"), meta.dump(2) + "\n");
}

void WriteRunRecord(const RunConfig& config, const RunOptions& options,
                    const std::string& command) {
  json run = {{"schema_version", kSchemaVersion},
              {"command", command},
              {"config_digest", config.Digest()},
              {"seed", config.seed},
              {"config", json::parse(config.ToJson())}};
  WriteFile(options.out_dir / "run.json", run.dump(2) + "\n");
}

void WriteRows(const fs::path& out_dir, const std::string& name,
               const std::vector<ResultRow>& rows, const RunConfig& config,
               const std::string& command) {
  WriteFile(out_dir / (name + ".csv"), FormatResultCsv(rows));
  WriteMeta(out_dir, name + ".csv", config, command);
}

std::uint64_t ModelSeed(std::uint64_t seed, ModelKind kind) {
  return MixSeed(seed, kModelStream + static_cast<std::uint64_t>(kind));
}

fs::path CheckpointPath(const RunConfig& config, ModelKind kind) {
  Check(!config.checkpoints.empty(), ErrorCode::kInvalidArgument,
        "config does not name a checkpoints directory");
  return config.checkpoints / (std::string(ModelKindName(kind)) + ".ckpt");
}

std::unique_ptr<Model> LoadModel(const RunConfig& config, ModelKind kind) {
  const fs::path path = CheckpointPath(config, kind);
  Check(fs::exists(path), ErrorCode::kNotFound,
        "missing checkpoint " + path.string());
  return ModelFromCheckpoint(LoadCheckpoint(path, kind));
}

std::string ScoresFileName(const std::string& target, const std::string& attacker,
                           const AttackSpec& spec) {
  return target + "__" + attacker + "__" + std::string(AttackKindName(spec.kind)) +
         "_" + Param(spec.param()) + ".jsonl";
}

struct Accumulator {
  std::vector<double> logits;
  std::vector<int> labels;
  std::vector<double> mcd;
  std::size_t flipped = 0;
};

ResultRow FinishRow(const std::string& target, const std::string& attacker,
                    const AttackSpec& spec, Accumulator& acc) {
  ResultRow row;
  row.target_model = target;
  row.attack_model = attacker;
  row.attack = spec.kind;
  row.param = spec.param();
  row.n = acc.logits.size();
  row.eer = ComputeEer(ScoresByLabel(acc.logits, acc.labels));
  row.mean_mcd = SummarizeMcd(acc.mcd).mean;
  row.flipped_frac = row.n == 0 ? 0.0
                                : static_cast<double>(acc.flipped) /
                                      static_cast<double>(row.n);
  return row;
}

std::vector<AttackSpec> WithNone(const std::vector<AttackSpec>& grid) {
  std::vector<AttackSpec> out = {AttackSpec{}};
  for (const AttackSpec& spec : grid) {
    if (spec.kind != AttackKind::kNone) out.push_back(spec);
  }
  return out;
}

std::vector<AttackSpec> WithoutNone(const std::vector<AttackSpec>& grid) {
  std::vector<AttackSpec> out;
  for (const AttackSpec& spec : grid) {
    if (spec.kind != AttackKind::kNone) out.push_back(spec);
  }
  return out;
}

}  // namespace

std::vector<AttackSpec> DefaultGrid() {
  std::vector<AttackSpec> grid;
  for (double eps : {0.0005, 0.00075, 0.001}) {
    grid.push_back({AttackKind::kFgsm, eps, 10.0, 10});
  }
  for (double eps : {0.1, 0.15, 0.2}) {
    grid.push_back({AttackKind::kPgdL2, eps, 10.0, 10});
  }
  for (double eta : {10.0, 20.0, 30.0}) {
    grid.push_back({AttackKind::kFab, 0.0, eta, 10});
  }
  return grid;
}

std::vector<AttackSpec> StrongestRoster() {
  return {{AttackKind::kFgsm, 0.001, 10.0, 10},
          {AttackKind::kPgdL2, 0.2, 10.0, 10},
          {AttackKind::kFab, 0.0, 30.0, 10}};
}

std::string RunConfig::ToJson() const {
  json grid_json = json::array();
  for (const AttackSpec& spec : grid) grid_json.push_back(SpecJson(spec));
  json roster_json = json::array();
  for (const AttackSpec& spec : adaptive.config.roster) {
    roster_json.push_back(SpecJson(spec));
  }
  json model_json = json::array();
  for (ModelKind kind : models) model_json.push_back(ModelKindName(kind));
  json j = {
      {"seed", seed},
      {"synth",
       {{"train_per_class", synth.train_per_class},
        {"valid_per_class", synth.valid_per_class},
        {"test_per_class", synth.test_per_class},
        {"seed", synth.seed},
        {"artifact_strength", synth.artifact_strength},
        {"duration_s", synth.duration_s}}},
      {"manifest", manifest.generic_string()},
      {"checkpoints", checkpoints.generic_string()},
      {"baseline", baseline.generic_string()},
      {"models", model_json},
      {"train",
       {{"learning_rate", train.learning_rate},
        {"batch_size", train.batch_size},
        {"epochs", train.epochs},
        {"weight_decay", train.weight_decay}}},
      {"grid", grid_json},
      {"adaptive",
       {{"clip", adaptive.config.clip},
        {"momentum", adaptive.config.momentum},
        {"non_attack", adaptive.config.non_attack},
        {"epochs", adaptive.config.epochs},
        {"roster", roster_json},
        {"target", ModelKindName(adaptive.target)},
        {"subset", SubsetJson(adaptive.subset)}}},
      {"eval", SubsetJson(eval)},
      {"mfcc_attacker", mfcc_attacker},
      {"export_wav", export_wav},
  };
  return j.dump();
}

std::string RunConfig::Digest() const { return Sha256Hex(ToJson()); }

RunConfig ParseRunConfig(std::string_view text, const fs::path& base_dir) {
  RunConfig config;
  config.grid = DefaultGrid();
  config.adaptive.config.roster = StrongestRoster();
  try {
    const json j = json::parse(text);
    Check(j.is_object(), ErrorCode::kInvalidArgument, "config must be an object");
    RejectUnknownKeys(j,
                      {"seed", "synth", "manifest", "checkpoints", "baseline",
                       "models", "train", "grid", "adaptive", "eval",
                       "mfcc_attacker", "export_wav"},
                      "config");
    config.seed = j.value("seed", std::uint64_t{0});
    config.synth.seed = config.seed;
    if (j.contains("synth")) {
      const json& s = j.at("synth");
      RejectUnknownKeys(s,
                        {"train_per_class", "valid_per_class", "test_per_class",
                         "seed", "artifact_strength", "duration_s"},
                        "synth");
      config.synth.train_per_class = s.value("train_per_class", 1000);
      config.synth.valid_per_class = s.value("valid_per_class", 100);
      config.synth.test_per_class = s.value("test_per_class", 1000);
      config.synth.seed = s.value("seed", config.seed);
      config.synth.artifact_strength = s.value("artifact_strength", 1.0);
      config.synth.duration_s = s.value("duration_s", 4.0);
    }
    config.manifest = Resolve(base_dir, j.value("manifest", std::string()));
    config.checkpoints = Resolve(base_dir, j.value("checkpoints", std::string()));
    config.baseline = Resolve(base_dir, j.value("baseline", std::string()));
    if (j.contains("models")) {
      config.models.clear();
      for (const json& m : j.at("models")) {
        config.models.push_back(ParseModelKind(m.get<std::string>()));
      }
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      RejectUnknownKeys(t, {"learning_rate", "batch_size", "epochs", "weight_decay"},
                        "train");
      config.train.learning_rate = t.value("learning_rate", 1e-3);
      config.train.batch_size = t.value("batch_size", 32);
      config.train.epochs = t.value("epochs", 10);
      config.train.weight_decay = t.value("weight_decay", 1e-4);
    }
    if (j.contains("grid")) {
      config.grid.clear();
      for (const json& g : j.at("grid")) config.grid.push_back(SpecFromJson(g));
    }
    if (j.contains("adaptive")) {
      const json& a = j.at("adaptive");
      RejectUnknownKeys(a,
                        {"clip", "momentum", "non_attack", "epochs", "roster",
                         "target", "subset"},
                        "adaptive");
      AdaptiveConfig& ac = config.adaptive.config;
      ac.clip = a.value("clip", 1.0);
      ac.momentum = a.value("momentum", 0.2);
      ac.non_attack = a.value("non_attack", 1.0 / 3.0);
      ac.epochs = a.value("epochs", 10);
      if (a.contains("roster")) {
        ac.roster.clear();
        for (const json& r : a.at("roster")) ac.roster.push_back(SpecFromJson(r));
      }
      if (a.contains("target")) {
        config.adaptive.target = ParseModelKind(a.at("target").get<std::string>());
      }
      if (a.contains("subset")) config.adaptive.subset = SubsetFromJson(a.at("subset"));
    }
    if (j.contains("eval")) config.eval = SubsetFromJson(j.at("eval"));
    config.mfcc_attacker = j.value("mfcc_attacker", false);
    config.export_wav = j.value("export_wav", false);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  config.train.seed = config.seed;
  config.synth.Validate();
  config.train.Validate();
  config.adaptive.config.Validate();
  for (const AttackSpec& spec : config.grid) spec.Validate();
  Check(!config.models.empty(), ErrorCode::kInvalidArgument, "no models configured");
  return config;
}

RunConfig LoadRunConfig(const fs::path& path) {
  return ParseRunConfig(ReadFile(path), path.parent_path());
}

std::string FormatResultCsv(const std::vector<ResultRow>& rows) {
  std::string out(kResultHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    out += r.target_model + ',' + r.attack_model + ',' +
           std::string(AttackKindName(r.attack)) + ',' + Param(r.param) + ',' +
           Num(r.eer) + ',' + Num(r.mean_mcd) + ',' + Num(r.flipped_frac) + ',' +
           std::to_string(r.n) + '\n';
  }
  return out;
}

std::vector<ResultRow> ParseResultCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Check(static_cast<bool>(std::getline(in, line)) && line == kResultHeader,
        ErrorCode::kSchemaMismatch, "unexpected result CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    Check(fields.size() == 8, ErrorCode::kSchemaMismatch,
          "result row has " + std::to_string(fields.size()) + " fields");
    ResultRow r;
    try {
      r.target_model = fields[0];
      r.attack_model = fields[1];
      r.attack = ParseAttackKind(fields[2]);
      r.param = std::stod(fields[3]);
      r.eer = std::stod(fields[4]);
      r.mean_mcd = std::stod(fields[5]);
      r.flipped_frac = std::stod(fields[6]);
      r.n = std::stoul(fields[7]);
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kSchemaMismatch, "malformed result row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

void PrepareRunDir(const fs::path& out_dir, bool force) {
  Check(!out_dir.empty(), ErrorCode::kInvalidArgument, "no output directory");
  std::error_code ec;
  if (fs::exists(out_dir)) {
    Check(fs::is_directory(out_dir), ErrorCode::kAlreadyExists,
          out_dir.string() + " exists and is not a directory");
    if (!fs::is_empty(out_dir)) {
      Check(force, ErrorCode::kAlreadyExists,
            out_dir.string() + " is not empty; pass --force to overwrite");
      fs::remove_all(out_dir, ec);
      Check(!ec, ErrorCode::kIo, "cannot clear " + out_dir.string());
    }
  }
  fs::create_directories(out_dir, ec);
  Check(!ec, ErrorCode::kIo, "cannot create " + out_dir.string());
}

Corpus LoadSplit(const RunConfig& config, Split split, int per_class_cap) {
  Check(!config.manifest.empty(), ErrorCode::kInvalidArgument,
        "config does not name a manifest");
  auto records = FilterSplit(ReadManifest(config.manifest), split);
  Check(!records.empty(), ErrorCode::kEmptyInput,
        "manifest has no " + std::string(SplitName(split)) + " records");
  if (per_class_cap > 0) {
    std::vector<ManifestRecord> capped;
    std::map<Label, int> taken;
    for (const ManifestRecord& r : records) {
      if (taken[r.label]++ < per_class_cap) capped.push_back(r);
    }
    records = std::move(capped);
  }
  if (split == Split::kTrain) {
    records = BalanceOversample(records, MixSeed(config.seed, kBalanceStream));
  }
  return Corpus::Load(records);
}

std::vector<ResultRow> RunAttackMatrix(const std::vector<MatrixEntry>& entries,
                                       const std::vector<AttackSpec>& grid,
                                       const Corpus& corpus,
                                       const fs::path& scores_dir,
                                       std::ostream* log) {
  Check(!corpus.empty(), ErrorCode::kEmptyInput, "empty evaluation corpus");
  if (!scores_dir.empty()) {
    std::error_code ec;
    fs::create_directories(scores_dir, ec);
    Check(!ec, ErrorCode::kIo, "cannot create " + scores_dir.string());
  }

  // Clean logits per distinct target model.
  std::map<const Model*, std::vector<double>> clean;
  for (const MatrixEntry& entry : entries) {
    for (const auto& [name, target] : entry.targets) {
      if (clean.count(target) != 0) continue;
      std::vector<double>& logits = clean[target];
      logits.reserve(corpus.size());
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        logits.push_back(target->Logit(corpus.waveform(i).samples));
      }
    }
  }

  std::vector<ResultRow> rows;
  for (const MatrixEntry& entry : entries) {
    const std::size_t n_targets = entry.targets.size();
    std::vector<std::vector<ResultRow>> per_target(n_targets);
    for (const AttackSpec& spec : grid) {
      Log(log, "attack " + spec.ToString() + " from " + entry.attacker_name);
      std::vector<Accumulator> acc(n_targets);
      std::vector<std::ofstream> outs(n_targets);
      if (!scores_dir.empty()) {
        for (std::size_t t = 0; t < n_targets; ++t) {
          const fs::path path = scores_dir / ScoresFileName(entry.targets[t].first,
                                                            entry.attacker_name, spec);
          outs[t].open(path, std::ios::binary | std::ios::trunc);
          Check(outs[t].good(), ErrorCode::kIo, "cannot write " + path.string());
        }
      }
      AttackDataset(*entry.attacker, spec, corpus, [&](const AttackRecord& record) {
        const std::size_t i = record.index;
        const Waveform clean_wave = corpus.waveform(i);
        const int label = static_cast<int>(corpus.label(i));
        std::optional<double> mcd;
        for (std::size_t t = 0; t < n_targets; ++t) {
          const Model* target = entry.targets[t].second;
          const double clean_logit = clean.at(target)[i];
          const double adv_logit = spec.kind == AttackKind::kNone
                                       ? clean_logit
                                       : target->Logit(record.outcome.adversarial);
          const bool flipped = Decision(adv_logit) != Decision(clean_logit);
          Accumulator& a = acc[t];
          a.logits.push_back(adv_logit);
          a.labels.push_back(label);
          if (flipped) {
            if (!mcd.has_value()) {
              mcd = ComputeMcd(clean_wave.samples, record.outcome.adversarial);
            }
            a.mcd.push_back(*mcd);
            ++a.flipped;
          }
          if (outs[t].is_open()) {
            json line = {{"index", i},
                         {"path", corpus.source(i).generic_string()},
                         {"label", label},
                         {"kind", AttackKindName(spec.kind)},
                         {"params", SpecJson(spec)},
                         {"clean_logit", clean_logit},
                         {"adv_logit", adv_logit},
                         {"linf_delta", record.outcome.linf_delta},
                         {"l2_delta", record.outcome.l2_delta},
                         {"flipped", flipped},
                         {"attacker_flipped", record.outcome.flipped},
                         {"mcd", flipped ? json(*mcd) : json(nullptr)},
                         {"ok", record.ok}};
            if (!record.ok) line["error"] = record.error;
            outs[t] << line.dump() << '\n';
          }
        }
      });
      for (std::size_t t = 0; t < n_targets; ++t) {
        per_target[t].push_back(
            FinishRow(entry.targets[t].first, entry.attacker_name, spec, acc[t]));
        Log(log, "  " + entry.targets[t].first + ": eer " +
                     Num(per_target[t].back().eer) + " flipped " +
                     Num(per_target[t].back().flipped_frac));
      }
    }
    for (auto& target_rows : per_target) {
      rows.insert(rows.end(), target_rows.begin(), target_rows.end());
    }
  }
  return rows;
}

std::vector<ManifestRecord> CmdSynthData(const RunConfig& config,
                                         const RunOptions& options) {
  PrepareRunDir(options.out_dir, options.force);
  Log(options, "synthesizing into " + options.out_dir.string());
  auto records = SynthesizeDataset(config.synth, options.out_dir);
  WriteRunRecord(config, options, "synth-data");
  WriteMeta(options.out_dir, "manifest.csv", config, "synth-data");
  return records;
}

std::vector<ResultRow> CmdTrain(const RunConfig& config, const RunOptions& options) {
  PrepareRunDir(options.out_dir, options.force);
  WriteRunRecord(config, options, "train");
  const Corpus train = LoadSplit(config, Split::kTrain, config.eval.train_per_class);
  const Corpus valid = LoadSplit(config, Split::kValid, config.eval.valid_per_class);
  const Corpus test = LoadSplit(config, Split::kTest, config.eval.test_per_class);
  Log(options, "train " + std::to_string(train.size()) + ", valid " +
                   std::to_string(valid.size()) + ", test " +
                   std::to_string(test.size()));

  std::vector<ModelKind> kinds = config.models;
  if (config.mfcc_attacker &&
      std::find(kinds.begin(), kinds.end(), ModelKind::kSpecNetMfcc) == kinds.end()) {
    kinds.push_back(ModelKind::kSpecNetMfcc);
  }
  const std::string digest = config.Digest();
  std::vector<ResultRow> rows;
  for (ModelKind kind : kinds) {
    const std::string name(ModelKindName(kind));
    auto model = MakeModel(kind);
    model->Initialize(ModelSeed(config.seed, kind));
    TrainConfig train_config = config.train;
    train_config.seed = ModelSeed(config.seed, kind);
    std::string history;
    const TrainResult result =
        Train(*model, train, valid, train_config, digest, [&](const EpochRecord& r) {
          json line = {{"epoch", r.epoch},
                       {"train_loss", r.train_loss},
                       {"valid_accuracy", r.valid_accuracy},
                       {"valid_eer", r.valid_eer}};
          history += line.dump() + "\n";
          Log(options, name + " epoch " + std::to_string(r.epoch) + " loss " +
                           Num(r.train_loss) + " valid acc " +
                           Num(r.valid_accuracy) + " eer " + Num(r.valid_eer));
        });
    SaveCheckpoint(options.out_dir / (name + ".ckpt"), result.best);
    WriteFile(options.out_dir / (name + ".train.jsonl"), history);
    WriteMeta(options.out_dir, name + ".train.jsonl", config, "train");
    WriteMeta(options.out_dir, name + ".ckpt", config, "train");

    auto best = ModelFromCheckpoint(result.best);
    MatrixEntry entry{name, best.get(), {{name, best.get()}}};
    auto clean = RunAttackMatrix({entry}, {AttackSpec{}}, test,
                                 options.out_dir / "scores", options.log);
    Log(options, name + " clean test eer " + Num(clean.front().eer));
    rows.insert(rows.end(), clean.begin(), clean.end());
  }
  WriteRows(options.out_dir, "clean", rows, config, "train");
  return rows;
}

std::vector<ResultRow> CmdWhitebox(const RunConfig& config,
                                   const RunOptions& options) {
  std::vector<std::unique_ptr<Model>> models;
  for (ModelKind kind : config.models) models.push_back(LoadModel(config, kind));
  PrepareRunDir(options.out_dir, options.force);
  WriteRunRecord(config, options, "whitebox");
  const Corpus test = LoadSplit(config, Split::kTest, config.eval.test_per_class);
  std::vector<MatrixEntry> entries;
  for (const auto& model : models) {
    const std::string name(ModelKindName(model->kind()));
    entries.push_back({name, model.get(), {{name, model.get()}}});
  }
  auto rows = RunAttackMatrix(entries, WithNone(config.grid), test,
                              options.out_dir / "scores", options.log);
  WriteRows(options.out_dir, "whitebox", rows, config, "whitebox");
  return rows;
}

std::vector<ResultRow> CmdTransfer(const RunConfig& config,
                                   const RunOptions& options) {
  Check(config.models.size() >= 2, ErrorCode::kInvalidArgument,
        "transfer needs at least two models");
  std::vector<std::unique_ptr<Model>> models;
  for (ModelKind kind : config.models) models.push_back(LoadModel(config, kind));
  std::unique_ptr<Model> mfcc;
  const bool mfcc_is_target =
      std::find(config.models.begin(), config.models.end(),
                ModelKind::kSpecNetMfcc) != config.models.end();
  if (config.mfcc_attacker && !mfcc_is_target) {
    mfcc = LoadModel(config, ModelKind::kSpecNetMfcc);
  }
  PrepareRunDir(options.out_dir, options.force);
  WriteRunRecord(config, options, "transfer");
  const Corpus test = LoadSplit(config, Split::kTest, config.eval.test_per_class);

  std::vector<MatrixEntry> entries;
  auto add_attacker = [&](const Model* attacker) {
    MatrixEntry entry;
    entry.attacker_name = ModelKindName(attacker->kind());
    entry.attacker = attacker;
    for (const auto& target : models) {
      if (target.get() == attacker) continue;
      entry.targets.push_back({std::string(ModelKindName(target->kind())), target.get()});
    }
    if (!entry.targets.empty()) entries.push_back(std::move(entry));
  };
  for (const auto& attacker : models) add_attacker(attacker.get());
  if (mfcc != nullptr) add_attacker(mfcc.get());

  auto rows = RunAttackMatrix(entries, WithoutNone(config.grid), test,
                              options.out_dir / "scores", options.log);
  // Present rows grouped by target, then attacker.
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    auto rank = [&](const std::string& name) {
      for (std::size_t i = 0; i < config.models.size(); ++i) {
        if (ModelKindName(config.models[i]) == name) return i;
      }
      return config.models.size();
    };
    return rank(a.target_model) < rank(b.target_model);
  });
  WriteRows(options.out_dir, "transfer", rows, config, "transfer");
  return rows;
}

AdvTrainResult CmdAdvTrain(const RunConfig& config, const RunOptions& options) {
  const ModelKind target_kind = config.adaptive.target;
  auto baseline = LoadModel(config, target_kind);
  std::vector<std::unique_ptr<Model>> others;
  for (ModelKind kind : config.models) {
    if (kind != target_kind) others.push_back(LoadModel(config, kind));
  }
  std::optional<std::vector<ResultRow>> reused;
  if (!config.baseline.empty()) {
    reused = ParseResultCsv(ReadFile(config.baseline / "whitebox.csv"));
  }
  PrepareRunDir(options.out_dir, options.force);
  WriteRunRecord(config, options, "adv-train");

  const SubsetSpec& cap = config.adaptive.subset;
  auto pick = [](int a, int b) { return a > 0 ? a : b; };
  const Corpus train =
      LoadSplit(config, Split::kTrain, pick(cap.train_per_class, config.eval.train_per_class));
  const Corpus valid =
      LoadSplit(config, Split::kValid, pick(cap.valid_per_class, config.eval.valid_per_class));
  const Corpus test = LoadSplit(config, Split::kTest, config.eval.test_per_class);

  const std::string base_name(ModelKindName(target_kind));
  const std::string tuned_name = base_name + "-adv";
  TrainConfig train_config = config.train;
  train_config.seed = MixSeed(ModelSeed(config.seed, target_kind), 1);
  AdvTrainResult result;
  std::string history;
  result.adaptive = AdvFinetune(
      *baseline, config.adaptive.config, train_config, train, valid, config.Digest(),
      [&](const AdaptiveEpoch& e) {
        Log(options, "adv epoch " + std::to_string(e.epoch) + " score " +
                         Num(e.score) + " clean eer " + Num(e.clean_eer));
      });
  for (std::size_t i = 0; i < result.adaptive.history.size(); ++i) {
    history += HistoryJsonLine(result.adaptive.history[i],
                               i == result.adaptive.selected_index) + "\n";
  }
  WriteFile(options.out_dir / "history.jsonl", history);
  WriteMeta(options.out_dir, "history.jsonl", config, "adv-train");
  SaveCheckpoint(options.out_dir / (tuned_name + ".ckpt"), result.adaptive.selected);
  WriteMeta(options.out_dir, tuned_name + ".ckpt", config, "adv-train");
  auto tuned = ModelFromCheckpoint(result.adaptive.selected);

  const auto grid = WithNone(config.grid);
  if (reused.has_value()) {
    for (const ResultRow& row : *reused) {
      if (row.target_model == base_name && row.attack_model == base_name) {
        result.before.push_back(row);
      }
    }
    Check(result.before.size() == grid.size(), ErrorCode::kSchemaMismatch,
          "baseline run does not cover the configured grid");
  } else {
    result.before = RunAttackMatrix({{base_name, baseline.get(), {{base_name, baseline.get()}}}},
                                    grid, test, options.out_dir / "scores", options.log);
  }
  result.after = RunAttackMatrix({{tuned_name, tuned.get(), {{tuned_name, tuned.get()}}}},
                                 grid, test, options.out_dir / "scores", options.log);
  std::vector<MatrixEntry> transfer;
  for (const auto& other : others) {
    transfer.push_back({std::string(ModelKindName(other->kind())), other.get(),
                        {{tuned_name, tuned.get()}}});
  }
  if (!transfer.empty()) {
    result.transfer = RunAttackMatrix(transfer, WithoutNone(config.grid), test,
                                      options.out_dir / "scores", options.log);
  }
  WriteRows(options.out_dir, "whitebox_before", result.before, config, "adv-train");
  WriteRows(options.out_dir, "whitebox_after", result.after, config, "adv-train");
  WriteRows(options.out_dir, "transfer_after", result.transfer, config, "adv-train");

  std::string comparison = "attack,param,eer_before,eer_after\n";
  for (std::size_t i = 0; i < result.after.size() && i < result.before.size(); ++i) {
    comparison += std::string(AttackKindName(result.after[i].attack)) + ',' +
                  Param(result.after[i].param) + ',' + Num(result.before[i].eer) +
                  ',' + Num(result.after[i].eer) + '\n';
  }
  WriteFile(options.out_dir / "comparison.csv", comparison);
  WriteMeta(options.out_dir, "comparison.csv", config, "adv-train");
  return result;
}

std::vector<ResultRow> CmdReport(const std::vector<fs::path>& run_dirs,
                                 const RunOptions& options) {
  Check(!run_dirs.empty(), ErrorCode::kInvalidArgument, "no run directories");
  struct Table {
    std::string title;
    std::vector<ResultRow> rows;
  };
  std::vector<Table> tables;
  std::vector<ResultRow> merged;
  std::set<std::string> digests;
  for (const fs::path& dir : run_dirs) {
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".csv" &&
          entry.path().filename() != "comparison.csv" &&
          entry.path().filename() != "manifest.csv") {
        csvs.push_back(entry.path());
      }
    }
    std::sort(csvs.begin(), csvs.end());
    for (const fs::path& csv : csvs) {
      const fs::path meta_path = csv.string() + ".meta.json";
      Check(fs::exists(meta_path), ErrorCode::kSchemaMismatch,
            "missing " + meta_path.string());
      const json meta = json::parse(ReadFile(meta_path));
      Check(meta.value("schema_version", -1) == kSchemaVersion,
            ErrorCode::kSchemaMismatch, "schema version mismatch in " + meta_path.string());
      digests.insert(meta.value("config_digest", std::string()));
      Table table{dir.filename().string() + "/" + csv.filename().string(),
                  ParseResultCsv(ReadFile(csv))};
      merged.insert(merged.end(), table.rows.begin(), table.rows.end());
      tables.push_back(std::move(table));
    }
  }

  PrepareRunDir(options.out_dir, options.force);
  WriteFile(options.out_dir / "report.csv", FormatResultCsv(merged));

  std::ostringstream md;
  md << "# Results\n";
  for (const Table& table : tables) {
    md << "\n## " << table.title << "\n\n";
    // Rows are attack settings; columns are (target, attacker) pairs.
    std::vector<std::pair<std::string, std::string>> columns;
    std::vector<std::pair<AttackKind, double>> settings;
    for (const ResultRow& r : table.rows) {
      const auto column = std::make_pair(r.target_model, r.attack_model);
      if (std::find(columns.begin(), columns.end(), column) == columns.end()) {
        columns.push_back(column);
      }
      const auto setting = std::make_pair(r.attack, r.param);
      if (std::find(settings.begin(), settings.end(), setting) == settings.end()) {
        settings.push_back(setting);
      }
    }
    md << "| attack | param |";
    for (const auto& [target, attacker] : columns) {
      md << ' ' << (target == attacker ? target : target + " <- " + attacker)
         << " EER | MCD |";
    }
    md << "\n|---|---|";
    for (std::size_t c = 0; c < columns.size(); ++c) md << "---|---|";
    md << '\n';
    for (const auto& [kind, param] : settings) {
      std::vector<const ResultRow*> cells(columns.size(), nullptr);
      double max_eer = -1.0;
      for (const ResultRow& r : table.rows) {
        if (r.attack != kind || r.param != param) continue;
        const auto it = std::find(columns.begin(), columns.end(),
                                  std::make_pair(r.target_model, r.attack_model));
        cells[static_cast<std::size_t>(it - columns.begin())] = &r;
        max_eer = std::max(max_eer, r.eer);
      }
      md << "| " << AttackKindName(kind) << " | " << Param(param) << " |";
      for (const ResultRow* cell : cells) {
        if (cell == nullptr) {
          md << " | |";
          continue;
        }
        char eer[32];
        char mcd[32];
        std::snprintf(eer, sizeof(eer), "%.4f", cell->eer);
        std::snprintf(mcd, sizeof(mcd), "%.3f", cell->mean_mcd);
        const bool bold = cells.size() > 1 && cell->eer == max_eer;
        md << ' ' << (bold ? "**" : "") << eer << (bold ? "**" : "") << " | "
           << mcd << " |";
      }
      md << '\n';
    }
  }
  md << "\nConfig digests:";
  for (const std::string& d : digests) md << ' ' << d;
  md << '\n';
  WriteFile(options.out_dir / "report.md", md.str());
  json meta = {{"schema_version", kSchemaVersion},
               {"command", "report"},
               {"source_digests", digests}};
  WriteFile(options.out_dir / "report.csv.meta.json", meta.dump(2) + "\n");
  return merged;
}

double RecomputeEerGap(const fs::path& run_dir, std::string_view name) {
  const auto rows =
      ParseResultCsv(ReadFile(run_dir / (std::string(name) + ".csv")));
  double worst = 0.0;
  for (const ResultRow& row : rows) {
    AttackSpec spec;
    spec.kind = row.attack;
    if (row.attack == AttackKind::kFab) {
      spec.eta = row.param;
    } else {
      spec.epsilon = row.param;
    }
    const fs::path scores = run_dir / "scores" /
                            ScoresFileName(row.target_model, row.attack_model, spec);
    std::istringstream in(ReadFile(scores));
    std::vector<double> logits;
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
      const json j = json::parse(line);
      logits.push_back(j.at("adv_logit").get<double>());
      labels.push_back(j.at("label").get<int>());
    }
    const double eer = ComputeEer(ScoresByLabel(logits, labels));
    worst = std::max(worst, std::abs(eer - row.eer));
  }
  return worst;
}

}  // namespace advdf::bench
