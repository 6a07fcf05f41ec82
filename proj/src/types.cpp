// Copyright 2026 The softle authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "softle/types.hpp"

#include <cmath>
#include <unordered_set>

#include "softle/error.hpp"

namespace softle {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage: return "usage";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kShape: return "shape";
    case ErrorCategory::kDivergence: return "divergence";
  }
  return "unknown";
}

std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kIdTest: return "id_test";
    case SplitTag::kOodTest: return "ood_test";
  }
  return "?";
}

SplitTag parse_split_tag(std::string_view text) {
  if (text == "train") return SplitTag::kTrain;
  if (text == "id_test") return SplitTag::kIdTest;
  if (text == "ood_test") return SplitTag::kOodTest;
  fail(ErrorCategory::kFormat, "unknown split_tag '" + std::string(text) + "'");
}

Dataset::Dataset(std::vector<Sample> samples, int num_classes, int num_features,
                 SplitTag split_tag)
    : samples_(std::move(samples)),
      num_classes_(num_classes),
      num_features_(num_features),
      split_tag_(split_tag) {
  if (num_classes_ <= 0) fail(ErrorCategory::kFormat, "num_classes must be positive");
  if (num_features_ <= 0) fail(ErrorCategory::kFormat, "num_features must be positive");
  std::unordered_set<std::int64_t> ids;
  ids.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    const std::string where = "sample " + std::to_string(i) + " (id " + std::to_string(s.id) + ")";
    if (s.features.size() != num_features_) {
      fail(ErrorCategory::kFormat, where + ": expected " + std::to_string(num_features_) +
                                       " features, got " + std::to_string(s.features.size()));
    }
    if (!s.features.allFinite()) fail(ErrorCategory::kFormat, where + ": non-finite feature");
    if (s.gold_class < 0 || s.gold_class >= num_classes_) {
      fail(ErrorCategory::kFormat, where + ": gold class " + std::to_string(s.gold_class) +
                                       " outside [0, " + std::to_string(num_classes_) + ")");
    }
    if (s.id < 0) fail(ErrorCategory::kFormat, where + ": negative id");
    if (!ids.insert(s.id).second) fail(ErrorCategory::kFormat, where + ": duplicate id");
  }
}

LabelVector LabelVector::hard(int gold_class, int num_classes) {
  if (num_classes <= 0 || gold_class < 0 || gold_class >= num_classes) {
    fail(ErrorCategory::kShape, "hard label: gold class outside [0, K)");
  }
  Vector probs = Vector::Zero(num_classes + 1);
  probs[gold_class] = 1.0;
  return LabelVector(std::move(probs), LabelKind::kHard, gold_class);
}

LabelVector LabelVector::soft(int gold_class, int num_classes, double shortcut_degree) {
  if (num_classes <= 0 || gold_class < 0 || gold_class >= num_classes) {
    fail(ErrorCategory::kShape, "soft label: gold class outside [0, K)");
  }
  if (!(shortcut_degree > 0.0 && shortcut_degree < 1.0)) {
    fail(ErrorCategory::kConfig, "soft label: shortcut degree must lie in (0, 1)");
  }
  Vector probs = Vector::Zero(num_classes + 1);
  probs[gold_class] = 1.0 - shortcut_degree;
  probs[num_classes] = shortcut_degree;
  return LabelVector(std::move(probs), LabelKind::kSoft, gold_class);
}

std::string_view to_string(Arch arch) {
  return arch == Arch::kLinear ? "linear" : "mlp";
}

std::string_view to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::kFirst: return "F";
    case ScheduleMode::kLast: return "L";
    case ScheduleMode::kNone: return "none";
  }
  return "?";
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

std::string_view to_string(LossKind kind) { return kind == LossKind::kHard ? "HL" : "SL"; }

std::string_view to_string(OodMode mode) {
  return mode == OodMode::kDecorrelated ? "decorrelated" : "inverted";
}

void RunConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorCategory::kConfig, msg); };
  if (!(xi > 0.0 && xi < 1.0)) bad("xi must lie in (0, 1)");
  if (!(beta >= 0.0)) bad("beta must be non-negative");
  if (!(alpha > 1.0 + beta)) bad("alpha must exceed 1 + beta");
  if (!(xi + beta > 1.0)) bad("xi + beta must exceed 1");
  if (teacher_epochs <= 0) bad("teacher_epochs must be positive");
  if (student_epochs <= 0) bad("student_epochs must be positive");
  if (warmup_epochs < 0) bad("warmup_epochs must be non-negative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be positive");
  if (hidden_size <= 0) bad("hidden_size must be positive");
  if (batch_size <= 0) bad("batch_size must be positive");
}

void BiasedDatasetSpec::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorCategory::kConfig, msg); };
  if (num_classes < 2) bad("data: num_classes must be at least 2");
  if (signal_features < num_classes) bad("data: signal_features must be at least num_classes");
  if (shortcut_features != num_classes) bad("data: shortcut_features must equal num_classes");
  if (!(rho >= 1.0 / num_classes - 1e-12 && rho <= 1.0)) bad("data: rho must lie in [1/K, 1]");
  if (!(signal_strength > 0.0)) bad("data: signal_strength must be positive");
  if (!(noise_sigma > 0.0)) bad("data: noise_sigma must be positive");
  if (n_train <= 0 || n_id <= 0 || n_ood <= 0) bad("data: split sizes must be positive");
}

}  // namespace softle
