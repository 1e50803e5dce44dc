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

#ifndef ADVDF_ATTACKS_H_
#define ADVDF_ATTACKS_H_

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advdf/common.h"
#include "advdf/corpus.h"
#include "advdf/models.h"

namespace advdf {

enum class AttackKind { kNone, kFgsm, kPgdL2, kFab };

std::string_view AttackKindName(AttackKind kind);  // none, fgsm, pgdl2, fab
AttackKind ParseAttackKind(std::string_view name);

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  double epsilon = 0.0;  // FGSM: L-inf budget. PGD-L2: L2 budget.
  double eta = 10.0;     // FAB overshoot, scale 1 + eta / 100
  int steps = 10;

  void Validate() const;
  // epsilon for FGSM and PGD-L2, eta for FAB, 0 for none.
  double param() const;
  // For example "pgdl2(0.2)".
  std::string ToString() const;
};

// Same kind and the parameter that the kind uses.
bool SameSetting(const AttackSpec& a, const AttackSpec& b);

struct AttackOutcome {
  std::vector<double> adversarial;
  double linf_delta = 0.0;
  double l2_delta = 0.0;
  bool flipped = false;
};

// FGSM: x + eps * sign(grad of BCE), clamped to [-1, 1].
AttackOutcome Fgsm(const Detector& model, std::span<const double> x, int label,
                   double epsilon);
// Applies a precomputed loss gradient; sign(0) = 0.
std::vector<double> FgsmStep(std::span<const double> x,
                             std::span<const double> loss_grad, double epsilon);

// Normalized-gradient ascent on BCE with step 2.5 * eps / steps, each
// iterate projected onto the L2 ball of radius eps around x, then clamped.
// Starts from x.
AttackOutcome PgdL2(const Detector& model, std::span<const double> x, int label,
                    double epsilon, int steps = 10);
// Scales `delta` in place onto the L2 ball of the given radius.
void ProjectL2(std::span<double> delta, double radius);

inline constexpr double kFabAlphaMax = 0.1;
inline constexpr double kFabBeta = 0.9;

// One boundary projection of binary FAB. `logit` and `grad` are the logit
// and its input gradient at `current`; `origin` is the clean input.
// Throws kZeroGradient when ||grad||_1 < 1e-12.
std::vector<double> FabStep(std::span<const double> origin,
                            std::span<const double> current, double logit,
                            std::span<const double> grad, double overshoot);

// Minimal L-inf boundary attack for one logit. Success means the decision
// differs from `label`; an input that is already misclassified comes back
// unchanged with flipped set.
AttackOutcome FabBinary(const Detector& model, std::span<const double> x,
                        int label, double eta, int steps = 10);

AttackOutcome RunAttack(const Detector& model, const AttackSpec& spec,
                        std::span<const double> x, int label);

// Fills in the norms of adversarial - x.
void MeasureDelta(std::span<const double> x, AttackOutcome& outcome);

struct AttackRecord {
  std::size_t index = 0;
  AttackOutcome outcome;  // the clean sample when `ok` is false
  bool ok = true;
  ErrorCode error_code = ErrorCode::kInvalidArgument;
  std::string error;
};

using AttackVisitor = std::function<void(const AttackRecord&)>;

// Attacks every corpus sample independently, in order, with gradients from
// `gradient_model` only. Per-sample failures are reported through the record
// instead of aborting.
void AttackDataset(const Detector& gradient_model, const AttackSpec& spec,
                   const Corpus& corpus, const AttackVisitor& visit);
std::vector<AttackRecord> AttackDataset(const Detector& gradient_model,
                                        const AttackSpec& spec,
                                        const Corpus& corpus);

}  // namespace advdf

#endif  // ADVDF_ATTACKS_H_
