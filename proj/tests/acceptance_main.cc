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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and a
// summary. The exit status is 0 whenever the run itself completes; pass
// --strict to also fail on any FAIL line.
//
//   advdf_acceptance --work /tmp/advdf_acceptance [--seed 7] [--strict]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advdf/adaptive.h"
#include "advdf/attacks.h"
#include "advdf/bench.h"
#include "advdf/checkpoint.h"
#include "advdf/common.h"
#include "advdf/metrics.h"
#include "oracles.h"

namespace advdf {
namespace {

namespace fs = std::filesystem;
using bench::ResultRow;

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Verdict {
  int id = 0;
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, a);
  return buffer;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const ResultRow* FindRow(const std::vector<ResultRow>& rows, const std::string& target,
                         const std::string& attacker, AttackKind kind, double param) {
  for (const ResultRow& r : rows) {
    if (r.target_model == target && r.attack_model == attacker && r.attack == kind &&
        std::abs(r.param - param) < 1e-12) {
      return &r;
    }
  }
  return nullptr;
}

Verdict AdaptiveUpdateExactness() {
  Stopwatch clock;
  const SamplingVector out =
      AdaptiveUpdate(InitialSamplingVector(2), 2.0, 1, 1.0, 0.2, 1.0 / 3.0);
  const double expected[] = {0.313725, 0.372549, 0.313725};
  double worked = 0.0;
  for (int k = 0; k < 3; ++k) worked = std::max(worked, std::abs(out[k] - expected[k]));

  Rng rng(101);
  SamplingVector w = InitialSamplingVector(3);
  double sum_error = 0.0;
  for (int i = 0; i < 10000; ++i) {
    w = AdaptiveUpdate(w, rng.Uniform(0.0, 3.0), rng.UniformIndex(w.size()), 1.0, 0.2,
                       1.0 / 3.0);
    sum_error = std::max(sum_error, std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0));
  }
  const double seconds = clock.Seconds();
  return {1, worked <= 1e-6 && sum_error <= 1e-12 && seconds < 1.0,
          "worked example max error " + Fmt("%.2e", worked) + ", fuzz sum error " +
              Fmt("%.2e", sum_error) + ", " + Fmt("%.3f", seconds) + " s"};
}

Verdict EpochSelection() {
  Rng rng(202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = oracle::RandomVector(2 + rng.UniformIndex(4), rng, 0.0, 1.0);
    worst = std::max(worst, std::abs(EpochScore(a) - oracle::BruteForceEpochScore(a)));
  }
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> scores(1 + rng.UniformIndex(10));
    for (auto& s : scores) s = static_cast<double>(rng.UniformIndex(5)) / 5.0;
    if (SelectEpoch(scores) != oracle::ExhaustiveArgmax(scores)) ++mismatches;
  }
  return {2, worst <= 1e-12 && mismatches == 0,
          "score max error " + Fmt("%.2e", worst) + ", selection mismatches " +
              std::to_string(mismatches) + "/1000"};
}

Verdict GradientIntegrity() {
  Stopwatch clock;
  const auto results = oracle::RunGradientChecks(20, 303);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& r : results) {
    if (r.worst_relative_error >= worst) {
      worst = r.worst_relative_error;
      worst_name = r.name;
    }
  }
  const double seconds = clock.Seconds();
  return {3, worst < 1e-4 && seconds < 120.0,
          std::to_string(results.size()) + " components x 20 instances, worst " +
              Fmt("%.2e", worst) + " (" + worst_name + "), " + Fmt("%.1f", seconds) +
              " s"};
}

Verdict MetricOracles() {
  Rng rng(404);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t total = 2 + rng.UniformIndex(199);
    const std::size_t nb = 1 + rng.UniformIndex(total - 1);
    ScoreSet s;
    for (std::size_t k = 0; k < nb; ++k) s.bonafide.push_back(rng.Normal());
    for (std::size_t k = nb; k < total; ++k) s.fake.push_back(rng.Normal() + 1.0);
    if (i % 4 == 0) {
      for (auto& v : s.bonafide) v = std::round(v * 3.0);
      for (auto& v : s.fake) v = std::round(v * 3.0);
    }
    worst = std::max(worst, std::abs(ComputeEer(s) - oracle::BruteForceEer(s.bonafide, s.fake)));
  }
  dsp::Matrix a = dsp::Matrix::Zero(10, 13);
  dsp::Matrix b = a;
  b.col(6).array() += 1.0;
  const double closed = 10.0 / std::numbers::ln10 * std::sqrt(2.0);
  const double mcd_error = std::abs(McdFromCepstra(a, b) - closed);
  const std::vector<double> x = oracle::ReferenceSignal();
  const double identical = ComputeMcd(x, x);
  return {4, worst <= 1e-9 && mcd_error <= 1e-9 && identical == 0.0,
          "EER max error " + Fmt("%.2e", worst) + ", MCD offset " +
              Fmt("%.6f", closed) + " (error " + Fmt("%.1e", mcd_error) +
              "), identical " + Fmt("%g", identical)};
}

Verdict AttackContracts(const bench::RunConfig& config) {
  Stopwatch clock;
  const Corpus test = bench::LoadSplit(config, Split::kTest, 0);
  const auto model = ModelFromCheckpoint(
      LoadCheckpoint(config.checkpoints / "rawnet.ckpt", ModelKind::kRawNet));
  std::size_t violations = 0;
  std::size_t attacked = 0;
  std::size_t failures = 0;
  for (const AttackSpec& spec : bench::DefaultGrid()) {
    AttackDataset(*model, spec, test, [&](const AttackRecord& r) {
      ++attacked;
      if (!r.ok) {
        ++failures;
        return;
      }
      const auto& adv = r.outcome.adversarial;
      const bool in_range = std::all_of(adv.begin(), adv.end(),
                                        [](double v) { return v >= -1.0 && v <= 1.0; });
      bool budget = true;
      if (spec.kind == AttackKind::kFgsm) budget = r.outcome.linf_delta <= spec.epsilon;
      if (spec.kind == AttackKind::kPgdL2) budget = r.outcome.l2_delta <= spec.epsilon + 1e-9;
      if (!in_range || !budget) ++violations;
    });
  }

  Rng rng(505);
  double worst_logit = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto w = oracle::RandomVector(kStandardLength, rng, -1.0, 1.0);
    const oracle::LinearDetector linear(w, rng.Uniform(-0.5, 0.5));
    const std::vector<double> x = test.waveform(i * test.size() / 100).samples;
    const auto next = FabStep(x, x, linear.Logit(x), w, 1.0);
    worst_logit = std::max(worst_logit, std::abs(linear.Logit(next)));
  }
  return {5, violations == 0 && failures == 0 && worst_logit < 1e-9,
          std::to_string(attacked) + " attacked test samples, " +
              std::to_string(violations) + " budget/range violations, " +
              std::to_string(failures) + " failures; linear FAB max |z| " +
              Fmt("%.1e", worst_logit) + ", " + Fmt("%.0f", clock.Seconds()) + " s"};
}

Verdict CleanGate(const std::vector<ResultRow>& clean, double seconds) {
  bool pass = seconds < 15.0 * 60.0;
  std::string detail;
  for (const ResultRow& r : clean) {
    pass = pass && r.eer <= 0.05 && r.n >= 2000;
    detail += r.target_model + " EER " + Fmt("%.4f", r.eer) + " (n=" +
              std::to_string(r.n) + "), ";
  }
  return {6, pass && clean.size() >= 2, detail + "training " + Fmt("%.0f", seconds) + " s"};
}

Verdict WhiteboxDegradation(const std::vector<ResultRow>& rows, const std::string& spec_name) {
  const ResultRow* clean = FindRow(rows, spec_name, spec_name, AttackKind::kNone, 0.0);
  if (clean == nullptr) return {7, false, "missing clean row"};
  bool pass = true;
  std::string detail = "clean " + Fmt("%.4f", clean->eer);
  for (const AttackSpec& spec : bench::StrongestRoster()) {
    const ResultRow* r = FindRow(rows, spec_name, spec_name, spec.kind, spec.param());
    if (r == nullptr) return {7, false, "missing " + spec.ToString()};
    pass = pass && r->eer - clean->eer >= 0.25;
    detail += ", " + spec.ToString() + " " + Fmt("%.4f", r->eer);
  }
  double previous = -1.0;
  bool monotone = true;
  detail += "; pgdl2 EERs";
  for (double eps : {0.1, 0.15, 0.2}) {
    const ResultRow* r = FindRow(rows, spec_name, spec_name, AttackKind::kPgdL2, eps);
    if (r == nullptr) return {7, false, "missing pgdl2 row"};
    monotone = monotone && r->eer >= previous;
    previous = r->eer;
    detail += " " + Fmt("%.4f", r->eer);
  }
  return {7, pass && monotone, detail};
}

Verdict TransferOrdering(const std::vector<ResultRow>& whitebox,
                         const std::vector<ResultRow>& transfer,
                         const std::string& target, const std::string& attacker) {
  const ResultRow* clean = FindRow(whitebox, target, target, AttackKind::kNone, 0.0);
  if (clean == nullptr) return {8, false, "missing clean row"};
  int below_whitebox = 0;
  int above_clean = 0;
  int settings = 0;
  for (const AttackSpec& spec : bench::DefaultGrid()) {
    const ResultRow* w = FindRow(whitebox, target, target, spec.kind, spec.param());
    const ResultRow* t = FindRow(transfer, target, attacker, spec.kind, spec.param());
    if (w == nullptr || t == nullptr) return {8, false, "missing " + spec.ToString()};
    ++settings;
    below_whitebox += t->eer <= w->eer ? 1 : 0;
    above_clean += t->eer >= clean->eer ? 1 : 0;
  }
  return {8, settings == 9 && below_whitebox >= 8 && above_clean >= 6,
          attacker + " -> " + target + ": transfer <= white-box in " +
              std::to_string(below_whitebox) + "/9, transfer >= clean in " +
              std::to_string(above_clean) + "/9"};
}

Verdict AdaptiveEfficacy(const bench::AdvTrainResult& result, double seconds) {
  auto mean_attacked = [](const std::vector<ResultRow>& rows) {
    double sum = 0.0;
    int n = 0;
    for (const ResultRow& r : rows) {
      if (r.attack == AttackKind::kNone) continue;
      sum += r.eer;
      ++n;
    }
    return n == 0 ? 0.0 : sum / n;
  };
  const double before = mean_attacked(result.before);
  const double after = mean_attacked(result.after);
  double clean_after = 1.0;
  for (const ResultRow& r : result.after) {
    if (r.attack == AttackKind::kNone) clean_after = r.eer;
  }
  const double drop = before > 0.0 ? (before - after) / before : 0.0;
  return {9, drop >= 0.30 && clean_after <= 0.15 && seconds < 30.0 * 60.0,
          "mean attacked EER " + Fmt("%.4f", before) + " -> " + Fmt("%.4f", after) +
              " (drop " + Fmt("%.1f", 100.0 * drop) + "%), clean after " +
              Fmt("%.4f", clean_after) + ", selected epoch " +
              std::to_string(result.adaptive.history[result.adaptive.selected_index].epoch) +
              ", " + Fmt("%.0f", seconds) + " s"};
}

// Every regular file under `dir` except run logs, keyed by relative path.
std::vector<std::pair<std::string, std::string>> Snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".csv" && ext != ".ckpt" && ext != ".jsonl") continue;
    files.emplace_back(fs::relative(entry.path(), dir).generic_string(),
                       ReadText(entry.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

Verdict Determinism(const fs::path& work, std::uint64_t seed) {
  const fs::path dir = work / "determinism";
  fs::create_directories(dir);
  std::ofstream(dir / "config.json")
      << "{\"seed\": " << seed << ",\n"
      << R"( "synth": {"train_per_class": 12, "valid_per_class": 4, "test_per_class": 6},
  "manifest": "data/manifest.csv",
  "checkpoints": "run_a/models",
  "train": {"epochs": 2, "batch_size": 8, "learning_rate": 0.005},
  "grid": [{"kind": "fgsm", "epsilon": 0.001},
           {"kind": "pgdl2", "epsilon": 0.2, "steps": 3},
           {"kind": "fab", "eta": 30, "steps": 3}]})";
  const bench::RunConfig config = bench::LoadRunConfig(dir / "config.json");
  auto options = [&](const std::string& name) {
    bench::RunOptions o;
    o.out_dir = dir / name;
    o.force = true;
    return o;
  };
  bench::CmdSynthData(config, options("data"));
  for (const std::string run : {"run_a", "run_b"}) {
    bench::CmdTrain(config, options(run + "/models"));
    bench::CmdWhitebox(config, options(run + "/whitebox"));
    bench::CmdTransfer(config, options(run + "/transfer"));
  }
  const auto a = Snapshot(dir / "run_a");
  const auto b = Snapshot(dir / "run_b");
  std::size_t csvs = 0;
  for (const auto& [name, bytes] : a) csvs += name.ends_with(".csv") ? 1 : 0;
  return {10, !a.empty() && a == b,
          std::to_string(a.size()) + " result files (" + std::to_string(csvs) +
              " CSVs) compared across two runs: " + (a == b ? "identical" : "DIFFER")};
}

void Print(const Verdict& v, std::ostream& log) {
  const std::string line = std::string(v.pass ? "PASS" : "FAIL") + "  criterion " +
                           std::to_string(v.id) + ": " + v.detail;
  std::cout << line << std::endl;
  log << line << std::endl;
}

int Run(const fs::path& work, std::uint64_t seed, bool strict) {
  ConfigureAllocator();
  fs::remove_all(work);
  fs::create_directories(work);
  std::ofstream log(work / "acceptance.txt");
  std::vector<Verdict> verdicts;
  auto record = [&](Verdict v) {
    Print(v, log);
    verdicts.push_back(std::move(v));
  };

  record(AdaptiveUpdateExactness());
  record(EpochSelection());
  record(GradientIntegrity());
  record(MetricOracles());

  // Full-size corpus and models.
  const std::string common =
      "\"seed\": " + std::to_string(seed) + R"(,
  "synth": {"train_per_class": 1000, "valid_per_class": 200, "test_per_class": 1000},
  "manifest": "data/manifest.csv",
  "checkpoints": "models",
  "baseline": "whitebox",
  "models": ["specnet-lfcc", "rawnet"],
  "train": {"learning_rate": 0.005, "batch_size": 16, "epochs": 10, "weight_decay": 0.0001},
  "adaptive": {"epochs": 10, "target": "specnet-lfcc",
               "subset": {"train_per_class": 200, "valid_per_class": 50}})";
  std::ofstream(work / "train.json") << "{" << common << "}\n";
  std::ofstream(work / "eval.json")
      << "{" << common << R"(,
  "eval": {"test_per_class": 100}})" << "\n";
  const bench::RunConfig train_config = bench::LoadRunConfig(work / "train.json");
  const bench::RunConfig eval_config = bench::LoadRunConfig(work / "eval.json");
  auto options = [&](const std::string& name) {
    bench::RunOptions o;
    o.out_dir = work / name;
    o.force = true;
    o.log = &log;
    return o;
  };

  bench::CmdSynthData(train_config, options("data"));
  Stopwatch train_clock;
  const auto clean = bench::CmdTrain(train_config, options("models"));
  const double train_seconds = train_clock.Seconds();

  record(AttackContracts(train_config));
  record(CleanGate(clean, train_seconds));

  const std::string spectral = "specnet-lfcc";
  const auto whitebox = bench::CmdWhitebox(eval_config, options("whitebox"));
  record(WhiteboxDegradation(whitebox, spectral));

  const auto transfer = bench::CmdTransfer(eval_config, options("transfer"));
  record(TransferOrdering(whitebox, transfer, spectral, "rawnet"));

  Stopwatch adv_clock;
  const auto adv = bench::CmdAdvTrain(eval_config, options("adv"));
  record(AdaptiveEfficacy(adv, adv_clock.Seconds()));

  bench::CmdReport({work / "models", work / "whitebox", work / "transfer", work / "adv"},
                   options("report"));

  record(Determinism(work, seed));

  const auto passed = std::count_if(verdicts.begin(), verdicts.end(),
                                    [](const Verdict& v) { return v.pass; });
  const std::string summary = std::to_string(passed) + "/" +
                              std::to_string(verdicts.size()) + " criteria passed";
  std::cout << summary << std::endl;
  log << summary << std::endl;
  return strict && passed != static_cast<long>(verdicts.size()) ? 1 : 0;
}

}  // namespace
}  // namespace advdf

int main(int argc, char** argv) {
  CLI::App app{"advdf acceptance run"};
  std::string work = "acceptance_work";
  std::uint64_t seed = 7;
  bool strict = false;
  app.add_option("--work", work, "Scratch directory (wiped first)");
  app.add_option("--seed", seed, "Global seed");
  app.add_flag("--strict", strict, "Exit non-zero when any criterion fails");
  CLI11_PARSE(app, argc, argv);
  try {
    return advdf::Run(work, seed, strict);
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << std::endl;
    return 2;
  }
}
