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

#include "advdf/attacks.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace advdf {
namespace {

double Clamp(double v) { return std::clamp(v, -1.0, 1.0); }

void CheckFiniteGradient(std::span<const double> grad) {
  for (double g : grad) {
    Check(std::isfinite(g), ErrorCode::kNonFinite, "non-finite input gradient");
  }
}

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Logit and BCE input gradient at x.
double LossGradient(const Detector& model, std::span<const double> x, int label,
                    std::vector<double>& grad) {
  grad.resize(x.size());
  const double logit = model.LogitGradient(x, grad);
  Check(std::isfinite(logit), ErrorCode::kNonFinite, "non-finite logit");
  const double scale = BceLossGrad(logit, label);
  for (double& g : grad) g *= scale;
  CheckFiniteGradient(grad);
  return logit;
}

void CheckLabel(int label) {
  Check(label == 0 || label == 1, ErrorCode::kInvalidArgument,
        "label must be 0 or 1");
}

}  // namespace

std::string_view AttackKindName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kFgsm: return "fgsm";
    case AttackKind::kPgdL2: return "pgdl2";
    case AttackKind::kFab: return "fab";
  }
  return "unknown";
}

AttackKind ParseAttackKind(std::string_view name) {
  for (AttackKind kind : {AttackKind::kNone, AttackKind::kFgsm,
                          AttackKind::kPgdL2, AttackKind::kFab}) {
    if (AttackKindName(kind) == name) return kind;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown attack '" + std::string(name) + "'");
}

void AttackSpec::Validate() const {
  switch (kind) {
    case AttackKind::kNone:
      return;
    case AttackKind::kFgsm:
      Check(epsilon >= 0.0 && std::isfinite(epsilon), ErrorCode::kInvalidArgument,
            "fgsm epsilon must be >= 0");
      return;
    case AttackKind::kPgdL2:
      Check(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::kInvalidArgument,
            "pgdl2 epsilon must be > 0");
      Check(steps >= 1, ErrorCode::kInvalidArgument, "pgdl2 steps must be >= 1");
      return;
    case AttackKind::kFab:
      Check(eta > 0.0 && std::isfinite(eta), ErrorCode::kInvalidArgument,
            "fab eta must be > 0");
      Check(steps >= 1, ErrorCode::kInvalidArgument, "fab steps must be >= 1");
      return;
  }
}

double AttackSpec::param() const {
  switch (kind) {
    case AttackKind::kNone: return 0.0;
    case AttackKind::kFab: return eta;
    default: return epsilon;
  }
}

std::string AttackSpec::ToString() const {
  if (kind == AttackKind::kNone) return "none";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%s(%g)",
                std::string(AttackKindName(kind)).c_str(), param());
  return buffer;
}

bool SameSetting(const AttackSpec& a, const AttackSpec& b) {
  return a.kind == b.kind && a.param() == b.param();
}

void MeasureDelta(std::span<const double> x, AttackOutcome& outcome) {
  Check(outcome.adversarial.size() == x.size(), ErrorCode::kShapeMismatch,
        "adversarial length differs from input");
  double linf = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = outcome.adversarial[i] - x[i];
    linf = std::max(linf, std::abs(d));
    sq += d * d;
  }
  outcome.linf_delta = linf;
  outcome.l2_delta = std::sqrt(sq);
}

std::vector<double> FgsmStep(std::span<const double> x,
                             std::span<const double> loss_grad, double epsilon) {
  Check(x.size() == loss_grad.size(), ErrorCode::kShapeMismatch,
        "gradient length differs from input");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = x[i] + epsilon * Sign(loss_grad[i]);
    // Keep the realized step within epsilon.
    while (std::abs(v - x[i]) > epsilon) v = std::nextafter(v, x[i]);
    out[i] = Clamp(v);
  }
  return out;
}

AttackOutcome Fgsm(const Detector& model, std::span<const double> x, int label,
                   double epsilon) {
  CheckLabel(label);
  Check(epsilon >= 0.0, ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  std::vector<double> grad;
  const double clean = LossGradient(model, x, label, grad);
  AttackOutcome outcome;
  outcome.adversarial = FgsmStep(x, grad, epsilon);
  MeasureDelta(x, outcome);
  outcome.flipped =
      Decision(model.Logit(outcome.adversarial)) != Decision(clean);
  return outcome;
}

void ProjectL2(std::span<double> delta, double radius) {
  double sq = 0.0;
  for (double d : delta) sq += d * d;
  const double norm = std::sqrt(sq);
  if (norm <= radius) return;
  const double scale = radius / norm;
  for (double& d : delta) d *= scale;
}

AttackOutcome PgdL2(const Detector& model, std::span<const double> x, int label,
                    double epsilon, int steps) {
  CheckLabel(label);
  Check(epsilon > 0.0, ErrorCode::kInvalidArgument, "epsilon must be > 0");
  Check(steps >= 1, ErrorCode::kInvalidArgument, "steps must be >= 1");
  const double alpha = 2.5 * epsilon / steps;
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> delta(x.size());
  std::vector<double> grad;
  double clean = 0.0;
  for (int t = 0; t < steps; ++t) {
    const double logit = LossGradient(model, current, label, grad);
    if (t == 0) clean = logit;
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double step = alpha / std::max(std::sqrt(sq), 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) {
      delta[i] = current[i] + step * grad[i] - x[i];
    }
    ProjectL2(delta, epsilon);
    for (std::size_t i = 0; i < x.size(); ++i) current[i] = Clamp(x[i] + delta[i]);
  }
  AttackOutcome outcome;
  outcome.adversarial = std::move(current);
  MeasureDelta(x, outcome);
  outcome.flipped = Decision(model.Logit(outcome.adversarial)) != Decision(clean);
  return outcome;
}

std::vector<double> FabStep(std::span<const double> origin,
                            std::span<const double> current, double logit,
                            std::span<const double> grad, double overshoot) {
  Check(origin.size() == current.size() && grad.size() == current.size(),
        ErrorCode::kShapeMismatch, "FAB operand lengths differ");
  double l1 = 0.0;
  double w_dot_offset = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    l1 += std::abs(grad[i]);
    w_dot_offset += grad[i] * (origin[i] - current[i]);
  }
  Check(std::isfinite(l1), ErrorCode::kNonFinite, "non-finite input gradient");
  Check(l1 >= 1e-12, ErrorCode::kZeroGradient, "logit gradient vanished");
  // Both projections are multiples of sign(w), so their L-inf norms are the
  // magnitudes of the multipliers.
  const double from_current = -logit / l1;
  const double from_origin = -(logit + w_dot_offset) / l1;
  const double n_current = std::abs(from_current);
  const double n_origin = std::abs(from_origin);
  const double alpha =
      n_current + n_origin > 0.0
          ? std::min(n_current / (n_current + n_origin), kFabAlphaMax)
          : 0.0;
  std::vector<double> next(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    const double s = Sign(grad[i]);
    const double a = current[i] + overshoot * from_current * s;
    const double b = origin[i] + overshoot * from_origin * s;
    next[i] = Clamp((1.0 - alpha) * a + alpha * b);
  }
  return next;
}

AttackOutcome FabBinary(const Detector& model, std::span<const double> x,
                        int label, double eta, int steps) {
  CheckLabel(label);
  Check(eta > 0.0, ErrorCode::kInvalidArgument, "eta must be > 0");
  Check(steps >= 1, ErrorCode::kInvalidArgument, "steps must be >= 1");
  const double overshoot = 1.0 + eta / 100.0;
  std::vector<double> grad(x.size());
  double logit = model.LogitGradient(x, grad);
  Check(std::isfinite(logit), ErrorCode::kNonFinite, "non-finite logit");
  CheckFiniteGradient(grad);

  AttackOutcome outcome;
  if (Decision(logit) != label) {
    outcome.adversarial.assign(x.begin(), x.end());
    outcome.flipped = true;
    return outcome;
  }

  std::vector<double> current(x.begin(), x.end());
  std::optional<std::vector<double>> best;
  double best_linf = std::numeric_limits<double>::infinity();
  bool grad_is_current = true;
  for (int t = 0; t < steps; ++t) {
    if (!grad_is_current) {
      logit = model.LogitGradient(current, grad);
      Check(std::isfinite(logit), ErrorCode::kNonFinite, "non-finite logit");
      CheckFiniteGradient(grad);
    }
    std::vector<double> next = FabStep(x, current, logit, grad, overshoot);
    const bool last = t + 1 == steps;
    // The gradient at the new iterate is reused by the next step unless the
    // iterate moves backward.
    const double next_logit =
        last ? model.Logit(next) : model.LogitGradient(next, grad);
    Check(std::isfinite(next_logit), ErrorCode::kNonFinite, "non-finite logit");
    grad_is_current = !last;
    logit = next_logit;
    if (Decision(next_logit) != label) {
      double linf = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        linf = std::max(linf, std::abs(next[i] - x[i]));
      }
      if (linf < best_linf) {
        best_linf = linf;
        best = next;
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        next[i] = kFabBeta * next[i] + (1.0 - kFabBeta) * x[i];
      }
      grad_is_current = false;
    }
    current = std::move(next);
  }

  if (best.has_value()) {
    outcome.adversarial = std::move(*best);
    outcome.flipped = true;
  } else {
    outcome.adversarial = std::move(current);
    outcome.flipped = false;
  }
  MeasureDelta(x, outcome);
  return outcome;
}

AttackOutcome RunAttack(const Detector& model, const AttackSpec& spec,
                        std::span<const double> x, int label) {
  spec.Validate();
  switch (spec.kind) {
    case AttackKind::kNone: {
      AttackOutcome outcome;
      outcome.adversarial.assign(x.begin(), x.end());
      return outcome;
    }
    case AttackKind::kFgsm:
      return Fgsm(model, x, label, spec.epsilon);
    case AttackKind::kPgdL2:
      return PgdL2(model, x, label, spec.epsilon, spec.steps);
    case AttackKind::kFab:
      return FabBinary(model, x, label, spec.eta, spec.steps);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown attack kind");
}

void AttackDataset(const Detector& gradient_model, const AttackSpec& spec,
                   const Corpus& corpus, const AttackVisitor& visit) {
  spec.Validate();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Waveform clean = corpus.waveform(i);
    AttackRecord record;
    record.index = i;
    try {
      record.outcome = RunAttack(gradient_model, spec, clean.samples,
                                 static_cast<int>(corpus.label(i)));
    } catch (const Error& e) {
      record.ok = false;
      record.error_code = e.code();
      record.error = e.what();
      record.outcome = AttackOutcome{};
      record.outcome.adversarial = clean.samples;
    }
    visit(record);
  }
}

std::vector<AttackRecord> AttackDataset(const Detector& gradient_model,
                                        const AttackSpec& spec,
                                        const Corpus& corpus) {
  std::vector<AttackRecord> records;
  records.reserve(corpus.size());
  AttackDataset(gradient_model, spec, corpus,
                [&](const AttackRecord& record) { records.push_back(record); });
  return records;
}

}  // namespace advdf
