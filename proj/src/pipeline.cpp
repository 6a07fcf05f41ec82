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

#include "softle/pipeline.hpp"

#include "softle/checkpoint.hpp"
#include "softle/error.hpp"

namespace softle {

std::vector<LossKind> loss_schedule(ScheduleMode mode, int hard_epochs, int epochs) {
  std::vector<LossKind> kinds(static_cast<std::size_t>(std::max(epochs, 0)), LossKind::kSoft);
  for (int e = 0; e < epochs; ++e) {
    const bool hard = (mode == ScheduleMode::kFirst && e < hard_epochs) ||
                      (mode == ScheduleMode::kLast && e >= epochs - hard_epochs);
    if (hard) kinds[static_cast<std::size_t>(e)] = LossKind::kHard;
  }
  return kinds;
}

namespace {

FitOptions fit_options(const RunConfig& cfg, int epochs, bool warmup, EvalSplits eval) {
  FitOptions o;
  o.epochs = epochs;
  o.learning_rate = cfg.learning_rate;
  o.warmup = warmup;
  o.batch_size = cfg.batch_size;
  o.optimizer = cfg.optimizer;
  o.xi = cfg.xi;
  o.id_test = eval.id_test;
  o.ood_test = eval.ood_test;
  return o;
}

std::vector<Vector> hard_targets(const Dataset& data, int outputs) {
  std::vector<Vector> targets;
  targets.reserve(data.size());
  for (const Sample& s : data.samples()) {
    Vector y = Vector::Zero(outputs);
    y[s.gold_class] = 1.0;
    targets.push_back(std::move(y));
  }
  return targets;
}

}  // namespace

TrainedModel train_teacher(const Dataset& train, const RunConfig& cfg, EvalSplits eval) {
  cfg.validate();
  const Rng root(cfg.seed);
  Rng init = root.substream("teacher/init");
  Rng shuffle = root.substream("teacher/shuffle");
  TrainedModel out;
  out.params = ClassifierParams::initialize(cfg.arch, train.num_features(), train.num_classes(),
                                            cfg.hidden_size, init);
  const std::vector<Vector> targets = hard_targets(train, train.num_classes());
  const SampleObjective objective = cross_entropy_objective(targets);
  out.log = fit(out.params, train, [&](int) { return EpochObjective{LossKind::kHard, objective}; },
                fit_options(cfg, cfg.teacher_epochs, false, eval), shuffle, "teacher");
  return out;
}

TrainedModel train_student(const Dataset& train, std::span<const LabelVector> soft_labels,
                           const RunConfig& cfg, EvalSplits eval) {
  cfg.validate();
  const int k = train.num_classes();
  const std::vector<LossKind> schedule =
      loss_schedule(cfg.schedule_mode, cfg.warmup_epochs, cfg.student_epochs);
  const bool needs_soft =
      std::find(schedule.begin(), schedule.end(), LossKind::kSoft) != schedule.end();

  std::vector<Vector> soft_targets;
  if (!soft_labels.empty() || needs_soft) {
    if (soft_labels.size() != train.size()) {
      fail(ErrorCategory::kShape, "student: " + std::to_string(soft_labels.size()) +
                                      " soft labels for " + std::to_string(train.size()) +
                                      " training samples");
    }
    soft_targets.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      const LabelVector& y = soft_labels[i];
      if (y.num_classes() != k || y.gold_class() != train[i].gold_class) {
        fail(ErrorCategory::kShape, "student: soft label " + std::to_string(i) +
                                        " does not match its training sample");
      }
      soft_targets.push_back(y.probs());
    }
  }
  const std::vector<Vector> hard = hard_targets(train, k + 1);

  const Rng root(cfg.seed);
  Rng init = root.substream("student/init");
  Rng shuffle = root.substream("student/shuffle");
  TrainedModel out;
  out.params =
      ClassifierParams::initialize(cfg.arch, train.num_features(), k + 1, cfg.hidden_size, init);
  const SampleObjective hard_objective = cross_entropy_objective(hard);
  const SampleObjective soft_objective = cross_entropy_objective(soft_targets);
  auto plan = [&](int epoch) {
    const LossKind kind = schedule[static_cast<std::size_t>(epoch)];
    return EpochObjective{kind, kind == LossKind::kHard ? hard_objective : soft_objective};
  };
  out.log = fit(out.params, train, plan, fit_options(cfg, cfg.student_epochs, true, eval), shuffle,
                "student");
  return out;
}

int infer(const ClassifierParams& student, const Vector& x) {
  const int outputs = student.num_outputs();
  if (outputs < 2) fail(ErrorCategory::kShape, "student needs at least one task class plus the dummy");
  const ForwardResult fwd = forward(student, x);
  int best = 0;
  for (int j = 1; j < outputs - 1; ++j) {
    if (fwd.probs[j] > fwd.probs[best]) best = j;
  }
  return best;
}

std::string format_report(const std::vector<EvalReport>& reports) {
  ordered_json j;
  j["format"] = "softle-report-v1";
  ordered_json models = ordered_json::array();
  for (const auto& r : reports) models.push_back(report_to_json(r));
  j["models"] = std::move(models);
  return j.dump(2) + "\n";
}

std::vector<EvalReport> parse_report(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kFormat, std::string("report: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "softle-report-v1" || !j.contains("models") ||
      !j["models"].is_array()) {
    fail(ErrorCategory::kFormat, "report: not a softle-report-v1 document");
  }
  std::vector<EvalReport> out;
  for (const auto& m : j["models"]) out.push_back(report_from_json(m));
  return out;
}

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    fail(e.category(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentPaths& paths,
                                const std::filesystem::path& out_dir) {
  stage("config", [&] { cfg.validate(); });
  const RunConfig& run = cfg.run;

  const auto [train, id_test, ood_test] = stage("load", [&] {
    return std::tuple{load_dataset(paths.train), load_dataset(paths.id_test),
                      load_dataset(paths.ood_test)};
  });
  stage("load", [&] {
    if (id_test.num_features() != train.num_features() ||
        ood_test.num_features() != train.num_features() ||
        id_test.num_classes() != train.num_classes() ||
        ood_test.num_classes() != train.num_classes()) {
      fail(ErrorCategory::kShape, "train, id_test and ood_test disagree on K or F");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCategory::kIo, "cannot create output directory '" + out_dir.string() + "'");
  });

  const EvalSplits eval{&id_test, &ood_test};
  const TrainedModel teacher = stage("train-teacher", [&] { return train_teacher(train, run, eval); });
  stage("train-teacher", [&] {
    save_checkpoint(teacher.params, run, out_dir / artifacts::kTeacherCheckpoint);
  });

  const auto encoded = stage("encode", [&] { return encode_labels(train, teacher.params, run); });
  stage("encode", [&] { save_annotations(annotations_of(encoded), out_dir / artifacts::kAnnotations); });

  const std::vector<LabelVector> labels = labels_of(encoded);
  const TrainedModel student =
      stage("train-student", [&] { return train_student(train, labels, run, eval); });
  stage("train-student", [&] {
    save_checkpoint(student.params, run, out_dir / artifacts::kStudentCheckpoint);
    write_file_atomic(out_dir / artifacts::kTrainLog, format_training_logs({teacher.log, student.log}));
  });

  ExperimentResult result = stage("evaluate", [&] {
    const bool synthetic_layout = train.num_features() == cfg.data.num_features() &&
                                  train.num_classes() == cfg.data.num_classes;
    const BiasedDatasetSpec* spec = synthetic_layout ? &cfg.data : nullptr;
    return ExperimentResult{evaluate(teacher.params, "teacher", id_test, ood_test, run, spec),
                            evaluate(student.params, "softle", id_test, ood_test, run, spec)};
  });
  stage("report", [&] {
    const std::vector<EvalReport> reports{result.teacher, result.student};
    write_file_atomic(out_dir / artifacts::kReport, format_report(reports));
    write_file_atomic(out_dir / artifacts::kMetrics, metrics_csv(reports));
    write_file_atomic(out_dir / artifacts::kHistogram, histogram_csv(reports));
  });
  return result;
}

}  // namespace softle
