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

// Command-line driver for the advdf benchmark workflow.
//
//   advdf synth-data --config run.json --out data/
//   advdf train      --config run.json --out models/
//   advdf whitebox   --config run.json --out whitebox/
//   advdf transfer   --config run.json --out transfer/ [--mfcc-attacker]
//   advdf adv-train  --config run.json --out adv/
//   advdf report     --out report/ whitebox/ transfer/ adv/
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advdf/bench.h"
#include "advdf/common.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int ExitCodeFor(advdf::ErrorCode code) {
  if (advdf::IsNumericError(code)) return kExitNumeric;
  if (code == advdf::ErrorCode::kInvalidArgument) return kExitUsage;
  return kExitData;
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
  bool mfcc_attacker = false;
  bool quiet = false;
  std::vector<std::string> runs;
};

advdf::bench::RunConfig ResolveConfig(const Flags& flags) {
  advdf::bench::RunConfig config = advdf::bench::LoadRunConfig(flags.config);
  if (flags.seed.has_value()) {
    // The synthetic corpus follows the global seed unless pinned separately.
    if (config.synth.seed == config.seed) config.synth.seed = *flags.seed;
    config.seed = *flags.seed;
    config.train.seed = *flags.seed;
  }
  if (flags.mfcc_attacker) config.mfcc_attacker = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  advdf::ConfigureAllocator();
  CLI::App app{"Adversarial robustness workbench for audio deepfake detectors"};
  app.require_subcommand(1);

  Flags flags;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config = sub->add_option("--config", flags.config, "JSON run config");
    if (needs_config) config->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Override the global seed");
    sub->add_option("--out", flags.out, "Run directory")->required();
    sub->add_flag("--force", flags.force, "Overwrite a non-empty run directory");
    sub->add_flag("--quiet", flags.quiet, "Suppress progress output");
  };

  auto* synth = app.add_subcommand("synth-data", "Generate the synthetic corpus");
  add_common(synth, true);
  auto* train = app.add_subcommand("train", "Train the configured detectors");
  add_common(train, true);
  train->add_flag("--mfcc-attacker", flags.mfcc_attacker,
                  "Also train an MFCC spectral model for transfer attacks");
  auto* whitebox = app.add_subcommand("whitebox", "White-box attack benchmark");
  add_common(whitebox, true);
  auto* transfer = app.add_subcommand("transfer", "Transferability benchmark");
  add_common(transfer, true);
  transfer->add_flag("--mfcc-attacker", flags.mfcc_attacker,
                     "Add the MFCC spectral model as an attack model");
  auto* adv = app.add_subcommand("adv-train", "Adaptive adversarial fine-tuning");
  add_common(adv, true);
  auto* report = app.add_subcommand("report", "Merge run directories into tables");
  report->add_option("--out", flags.out, "Report directory")->required();
  report->add_flag("--force", flags.force, "Overwrite a non-empty report directory");
  report->add_option("runs", flags.runs, "Run directories")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  advdf::bench::RunOptions options;
  options.out_dir = flags.out;
  options.force = flags.force;
  options.log = flags.quiet ? nullptr : &std::cerr;

  try {
    if (report->parsed()) {
      std::vector<std::filesystem::path> runs(flags.runs.begin(), flags.runs.end());
      const auto rows = advdf::bench::CmdReport(runs, options);
      std::cout << "merged " << rows.size() << " rows into " << flags.out << "\n";
      return 0;
    }
    const advdf::bench::RunConfig config = ResolveConfig(flags);
    std::cerr << "config digest " << config.Digest() << " seed " << config.seed
              << "\n";
    if (synth->parsed()) {
      const auto records = advdf::bench::CmdSynthData(config, options);
      std::cout << "wrote " << records.size() << " utterances\n";
    } else if (train->parsed()) {
      for (const auto& row : advdf::bench::CmdTrain(config, options)) {
        std::cout << row.target_model << " clean EER " << row.eer << "\n";
      }
    } else if (whitebox->parsed()) {
      std::cout << advdf::bench::FormatResultCsv(
          advdf::bench::CmdWhitebox(config, options));
    } else if (transfer->parsed()) {
      std::cout << advdf::bench::FormatResultCsv(
          advdf::bench::CmdTransfer(config, options));
    } else if (adv->parsed()) {
      const auto result = advdf::bench::CmdAdvTrain(config, options);
      std::cout << "selected epoch "
                << result.adaptive.history[result.adaptive.selected_index].epoch
                << "\n"
                << advdf::bench::FormatResultCsv(result.after);
    }
  } catch (const advdf::Error& e) {
    std::cerr << "advdf: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "advdf: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
