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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "softle/model.hpp"
#include "softle/rng.hpp"
#include "softle/types.hpp"

namespace softle {

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  LossKind loss_kind = LossKind::kHard;
  double train_accuracy = 0.0;
  double train_overconfidence = 0.0;
  std::optional<double> id_accuracy;
  std::optional<double> ood_accuracy;
  std::optional<double> id_overconfidence;
  std::optional<double> ood_overconfidence;
};

struct TrainingLog {
  std::string model;
  std::vector<EpochRecord> epochs;

  std::vector<LossKind> loss_kinds() const;
};

/// train_log.csv: one header line, then one row per (model, epoch). Optional
/// evaluation columns are left empty when no evaluation split was supplied.
std::string format_training_logs(const std::vector<TrainingLog>& logs);

/// Per-sample objective. Writes dLoss/dlogits for sample `index` into
/// `logit_grad` and returns the sample's loss; both already carry any
/// per-sample weight.
using SampleObjective =
    std::function<double(std::size_t index, const ForwardResult& fwd, Vector& logit_grad)>;

struct EpochObjective {
  LossKind kind = LossKind::kHard;
  SampleObjective objective;
};

struct FitOptions {
  int epochs = 1;
  double learning_rate = 0.01;
  /// Linear ramp over the first 10% of steps, then linear decay to zero.
  /// Constant rate when false.
  bool warmup = false;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double xi = 0.9;
  const Dataset* id_test = nullptr;
  const Dataset* ood_test = nullptr;
};

/// Learning rate for 0-based `step` out of `total_steps`.
double scheduled_learning_rate(double base, long step, long total_steps, bool warmup);

/// Mini-batch training. Samples are reshuffled every epoch from `shuffle_rng`;
/// batch gradients are averaged over the batch size. Throws kDivergence on a
/// non-finite loss or gradient.
TrainingLog fit(ClassifierParams& params, const Dataset& train,
                const std::function<EpochObjective(int epoch)>& plan, const FitOptions& options,
                Rng& shuffle_rng, std::string model_name);

/// Objective for plain cross-entropy against fixed targets (one per sample),
/// each optionally scaled by a weight.
SampleObjective cross_entropy_objective(const std::vector<Vector>& targets,
                                        const std::vector<double>* weights = nullptr);

}  // namespace softle
