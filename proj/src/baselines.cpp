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

#include "softle/baselines.hpp"

#include <cmath>

#include "softle/error.hpp"

namespace softle {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kNone: return "none";
    case BaselineKind::kReweighting: return "reweighting";
    case BaselineKind::kPoe: return "poe";
  }
  return "?";
}

BaselineKind parse_baseline_kind(std::string_view text) {
  if (text == "none") return BaselineKind::kNone;
  if (text == "reweighting") return BaselineKind::kReweighting;
  if (text == "poe") return BaselineKind::kPoe;
  fail(ErrorCategory::kConfig, "unknown baseline '" + std::string(text) + "'");
}

namespace {

void require_teacher(const Dataset& train, const ClassifierParams& teacher) {
  if (teacher.num_outputs() != train.num_classes()) {
    fail(ErrorCategory::kShape, "teacher has " + std::to_string(teacher.num_outputs()) +
                                    " outputs, dataset has " +
                                    std::to_string(train.num_classes()) + " classes");
  }
}

std::vector<Vector> one_hot_targets(const Dataset& data) {
  std::vector<Vector> targets;
  targets.reserve(data.size());
  for (const Sample& s : data.samples()) {
    Vector y = Vector::Zero(data.num_classes());
    y[s.gold_class] = 1.0;
    targets.push_back(std::move(y));
  }
  return targets;
}

TrainedModel fit_baseline(BaselineKind kind, const Dataset& train, const SampleObjective& objective,
                          const RunConfig& cfg, EvalSplits eval) {
  cfg.validate();
  // Shared by every baseline kind so that runs differ only in the objective.
  const Rng root(cfg.seed);
  Rng init = root.substream("baseline/init");
  Rng shuffle = root.substream("baseline/shuffle");
  TrainedModel out;
  out.params = ClassifierParams::initialize(cfg.arch, train.num_features(), train.num_classes(),
                                            cfg.hidden_size, init);
  FitOptions o;
  o.epochs = cfg.student_epochs;
  o.learning_rate = cfg.learning_rate;
  o.warmup = true;
  o.batch_size = cfg.batch_size;
  o.optimizer = cfg.optimizer;
  o.xi = cfg.xi;
  o.id_test = eval.id_test;
  o.ood_test = eval.ood_test;
  out.log = fit(out.params, train, [&](int) { return EpochObjective{LossKind::kHard, objective}; },
                o, shuffle, std::string(to_string(kind)));
  return out;
}

}  // namespace

std::vector<double> teacher_gold_confidences(const Dataset& train, const ClassifierParams& teacher) {
  require_teacher(train, teacher);
  std::vector<double> sigma;
  sigma.reserve(train.size());
  for (const Sample& s : train.samples()) sigma.push_back(forward(teacher, s.features).probs[s.gold_class]);
  return sigma;
}

std::vector<Vector> teacher_log_probabilities(const Dataset& train, const ClassifierParams& teacher) {
  require_teacher(train, teacher);
  std::vector<Vector> out;
  out.reserve(train.size());
  for (const Sample& s : train.samples()) {
    const ForwardResult fwd = forward(teacher, s.features);
    // log-softmax straight from the logits; exact even when a probability underflows.
    const double max = fwd.logits.maxCoeff();
    const double lse = max + std::log((fwd.logits.array() - max).exp().sum());
    out.push_back((fwd.logits.array() - lse).matrix());
  }
  return out;
}

SampleObjective reweighted_objective(const std::vector<Vector>& targets,
                                     const std::vector<double>& weights) {
  return cross_entropy_objective(targets, &weights);
}

SampleObjective poe_objective(const std::vector<Vector>& targets,
                              const std::vector<Vector>& teacher_log_probs) {
  return [&targets, &teacher_log_probs](std::size_t index, const ForwardResult& fwd,
                                        Vector& logit_grad) {
    // softmax(log p_s + log p_t) == softmax(z_s + log p_t): the student's own
    // log-normalizer is a constant shift.
    const Vector combined = softmax(fwd.logits + teacher_log_probs[index]);
    const Vector& y = targets[index];
    logit_grad = combined - y;
    return cross_entropy(combined, y);
  };
}

TrainedModel train_standard(const Dataset& train, const RunConfig& cfg, EvalSplits eval) {
  const std::vector<Vector> targets = one_hot_targets(train);
  return fit_baseline(BaselineKind::kNone, train, cross_entropy_objective(targets), cfg, eval);
}

TrainedModel train_reweighted(const Dataset& train, const ClassifierParams& teacher,
                              const RunConfig& cfg, EvalSplits eval) {
  const std::vector<Vector> targets = one_hot_targets(train);
  std::vector<double> weights = teacher_gold_confidences(train, teacher);
  for (double& w : weights) w = 1.0 - w;
  return fit_baseline(BaselineKind::kReweighting, train, reweighted_objective(targets, weights),
                      cfg, eval);
}

TrainedModel train_poe(const Dataset& train, const ClassifierParams& teacher,
                       const RunConfig& cfg, EvalSplits eval) {
  const std::vector<Vector> targets = one_hot_targets(train);
  const std::vector<Vector> teacher_log_probs = teacher_log_probabilities(train, teacher);
  return fit_baseline(BaselineKind::kPoe, train, poe_objective(targets, teacher_log_probs), cfg,
                      eval);
}

TrainedModel train_baseline(BaselineKind kind, const Dataset& train,
                            const ClassifierParams* teacher, const RunConfig& cfg,
                            EvalSplits eval) {
  if (kind == BaselineKind::kNone) return train_standard(train, cfg, eval);
  if (teacher == nullptr) {
    fail(ErrorCategory::kIo, "baseline '" + std::string(to_string(kind)) + "' needs a teacher");
  }
  return kind == BaselineKind::kReweighting ? train_reweighted(train, *teacher, cfg, eval)
                                            : train_poe(train, *teacher, cfg, eval);
}

}  // namespace softle
