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

// Microbenchmarks for the front-end, the two detectors, and the attacks.
//
//   ./build/benchmarks/advdf_bench --benchmark_filter=Attack

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "advdf/attacks.h"
#include "advdf/audio.h"
#include "advdf/dsp.h"
#include "advdf/metrics.h"
#include "advdf/models.h"
#include "advdf/synth.h"
#include "benchmark/benchmark.h"

namespace advdf {
namespace {

std::vector<double> Utterance(std::uint64_t seed, Label label = Label::kBonafide) {
  return SynthesizeUtterance(seed, label, 1.0, 4.0).samples;
}

std::unique_ptr<Model> Detector(ModelKind kind) {
  auto model = MakeModel(kind);
  model->Initialize(11);
  return model;
}

void BM_Lfcc(benchmark::State& state) {
  const auto x = Utterance(1);
  for (auto _ : state) benchmark::DoNotOptimize(dsp::Lfcc(x));
}
BENCHMARK(BM_Lfcc)->Unit(benchmark::kMillisecond);

void BM_Mfcc(benchmark::State& state) {
  const auto x = Utterance(2);
  for (auto _ : state) benchmark::DoNotOptimize(dsp::Mfcc(x));
}
BENCHMARK(BM_Mfcc)->Unit(benchmark::kMillisecond);

void BM_Logit(benchmark::State& state) {
  const auto model = Detector(static_cast<ModelKind>(state.range(0)));
  const auto x = Utterance(3);
  for (auto _ : state) benchmark::DoNotOptimize(model->Logit(x));
  state.SetLabel(std::string(ModelKindName(static_cast<ModelKind>(state.range(0)))));
}
BENCHMARK(BM_Logit)
    ->Arg(static_cast<int>(ModelKind::kSpecNetLfcc))
    ->Arg(static_cast<int>(ModelKind::kRawNet))
    ->Unit(benchmark::kMillisecond);

void BM_LossAndGradients(benchmark::State& state) {
  const auto model = Detector(static_cast<ModelKind>(state.range(0)));
  const auto x = Utterance(4);
  std::vector<double> param_grad(model->ParameterCount());
  std::vector<double> input_grad(x.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->LossAndGradients(x, 1, param_grad, input_grad));
  }
  state.SetLabel(std::string(ModelKindName(static_cast<ModelKind>(state.range(0)))));
}
BENCHMARK(BM_LossAndGradients)
    ->Arg(static_cast<int>(ModelKind::kSpecNetLfcc))
    ->Arg(static_cast<int>(ModelKind::kRawNet))
    ->Unit(benchmark::kMillisecond);

void BM_Attack(benchmark::State& state) {
  const auto model = Detector(ModelKind::kRawNet);
  const auto x = Utterance(5, Label::kFake);
  AttackSpec spec;
  spec.kind = static_cast<AttackKind>(state.range(0));
  spec.epsilon = spec.kind == AttackKind::kFgsm ? 0.001 : 0.2;
  spec.eta = 30.0;
  for (auto _ : state) benchmark::DoNotOptimize(RunAttack(*model, spec, x, 1));
  state.SetLabel(spec.ToString());
}
BENCHMARK(BM_Attack)
    ->Arg(static_cast<int>(AttackKind::kFgsm))
    ->Arg(static_cast<int>(AttackKind::kPgdL2))
    ->Arg(static_cast<int>(AttackKind::kFab))
    ->Unit(benchmark::kMillisecond);

void BM_Mcd(benchmark::State& state) {
  const auto a = Utterance(6);
  const auto b = Utterance(7);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeMcd(a, b));
}
BENCHMARK(BM_Mcd)->Unit(benchmark::kMillisecond);

void BM_Eer(benchmark::State& state) {
  ScoreSet scores;
  for (int i = 0; i < state.range(0); ++i) {
    scores.bonafide.push_back(-0.001 * i);
    scores.fake.push_back(0.0013 * i - 0.4);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ComputeEer(scores));
}
BENCHMARK(BM_Eer)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace advdf

BENCHMARK_MAIN();
