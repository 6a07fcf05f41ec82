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

#include <filesystem>
#include <span>
#include <vector>

#include "softle/eval.hpp"
#include "softle/io.hpp"
#include "softle/labeling.hpp"
#include "softle/model.hpp"
#include "softle/trainer.hpp"

namespace softle {

/// Loss kind of each student epoch: kFirst puts `hard_epochs` HL epochs at the
/// start, kLast at the end, kNone trains SL throughout. `hard_epochs` larger
/// than `epochs` makes every epoch HL.
std::vector<LossKind> loss_schedule(ScheduleMode mode, int hard_epochs, int epochs);

/// Optional evaluation splits whose accuracy and over-confidence ratio are
/// logged after every epoch.
struct EvalSplits {
  const Dataset* id_test = nullptr;
  const Dataset* ood_test = nullptr;
};

struct TrainedModel {
  ClassifierParams params;
  TrainingLog log;
};

/// Hard-label K-class training for cfg.teacher_epochs at a constant learning
/// rate. Initialization and shuffling use the "teacher/*" substreams of cfg.seed.
TrainedModel train_teacher(const Dataset& train, const RunConfig& cfg, EvalSplits eval = {});

/// (K+1)-class student trained from a fresh initialization. HL epochs use the
/// gold one-hot extended with a zero dummy; SL epochs use `soft_labels`, which
/// must align 1:1 with `train` and may be empty only when no epoch is SL.
/// Learning rate warms up over 10% of steps then decays linearly to zero.
TrainedModel train_student(const Dataset& train, std::span<const LabelVector> soft_labels,
                           const RunConfig& cfg, EvalSplits eval = {});

/// Predicted class in [0, K) for a (K+1)-output student. The dummy output is
/// ignored; ties go to the lowest index.
int infer(const ClassifierParams& student, const Vector& x);

struct ExperimentPaths {
  std::filesystem::path train;
  std::filesystem::path id_test;
  std::filesystem::path ood_test;
};

struct ExperimentResult {
  EvalReport teacher;
  EvalReport student;
};

/// Output file names inside an experiment directory.
namespace artifacts {
inline constexpr const char* kTeacherCheckpoint = "teacher.ckpt";
inline constexpr const char* kStudentCheckpoint = "student.ckpt";
inline constexpr const char* kAnnotations = "annotations.jsonl";
inline constexpr const char* kTrainLog = "train_log.csv";
inline constexpr const char* kReport = "report";
inline constexpr const char* kMetrics = "metrics.csv";
inline constexpr const char* kHistogram = "histogram.csv";
}  // namespace artifacts

/// Serializes evaluation reports to the `report` file body.
std::string format_report(const std::vector<EvalReport>& reports);
std::vector<EvalReport> parse_report(std::string_view text);

/// Teacher training, label encoding, student training and evaluation on the
/// ID and OOD splits. Writes every artifact listed in `artifacts` into
/// `out_dir`. Errors carry the failing stage's name.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentPaths& paths,
                                const std::filesystem::path& out_dir);

}  // namespace softle
