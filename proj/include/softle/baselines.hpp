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

#pragma once

#include <string_view>
#include <vector>

#include "softle/model.hpp"
#include "softle/pipeline.hpp"

namespace softle {

enum class BaselineKind { kNone, kReweighting, kPoe };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view text);

/// Teacher probability on each sample's gold class, in dataset order.
std::vector<double> teacher_gold_confidences(const Dataset& train, const ClassifierParams& teacher);

// All baselines train a fresh K-output model with the student's regime
// (cfg.student_epochs, learning-rate warm-up) from the shared "baseline/*" substreams,
// so that they differ from each other only in the objective.

/// Standard hard-label cross-entropy.
TrainedModel train_standard(const Dataset& train, const RunConfig& cfg, EvalSplits eval = {});

/// Example reweighting: sample i's loss is scaled by 1 - sigma_i, where sigma_i
/// is the frozen teacher's gold-class probability. Weights are fixed up front.
TrainedModel train_reweighted(const Dataset& train, const ClassifierParams& teacher,
                              const RunConfig& cfg, EvalSplits eval = {});

/// Product of experts: the loss is cross-entropy of
/// softmax(log p_student + log p_teacher) against the gold label. Only the
/// student receives gradients; inference uses the student alone.
TrainedModel train_poe(const Dataset& train, const ClassifierParams& teacher,
                       const RunConfig& cfg, EvalSplits eval = {});

/// Per-sample objectives, exposed for gradient-level checks.
SampleObjective reweighted_objective(const std::vector<Vector>& targets,
                                     const std::vector<double>& weights);
SampleObjective poe_objective(const std::vector<Vector>& targets,
                              const std::vector<Vector>& teacher_log_probs);

/// log of the teacher's softmax for every training sample.
std::vector<Vector> teacher_log_probabilities(const Dataset& train, const ClassifierParams& teacher);

TrainedModel train_baseline(BaselineKind kind, const Dataset& train,
                            const ClassifierParams* teacher, const RunConfig& cfg,
                            EvalSplits eval = {});

}  // namespace softle
