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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace softle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class SplitTag { kTrain, kIdTest, kOodTest };

std::string_view to_string(SplitTag tag);
SplitTag parse_split_tag(std::string_view text);

struct Sample {
  Vector features;
  int gold_class = 0;
  std::int64_t id = 0;
};

/// Immutable labelled sample collection. The constructor enforces that every
/// sample has `num_features` finite features, a gold class in [0, K) and a
/// unique non-negative id.
class Dataset {
 public:
  Dataset(std::vector<Sample> samples, int num_classes, int num_features,
          SplitTag split_tag);

  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int num_classes() const { return num_classes_; }
  int num_features() const { return num_features_; }
  SplitTag split_tag() const { return split_tag_; }

 private:
  std::vector<Sample> samples_;
  int num_classes_;
  int num_features_;
  SplitTag split_tag_;
};

enum class LabelKind { kHard, kSoft };

/// Training target over K task classes plus the dummy class at index K.
///
/// Hard: one-hot at the gold class, dummy 0.
/// Soft: 1 - s at the gold class, s at the dummy, zero elsewhere.
class LabelVector {
 public:
  static LabelVector hard(int gold_class, int num_classes);
  static LabelVector soft(int gold_class, int num_classes, double shortcut_degree);

  const Vector& probs() const { return probs_; }
  LabelKind kind() const { return kind_; }
  int gold_class() const { return gold_class_; }
  int num_classes() const { return static_cast<int>(probs_.size()) - 1; }
  double dummy() const { return probs_[probs_.size() - 1]; }

 private:
  LabelVector(Vector probs, LabelKind kind, int gold_class)
      : probs_(std::move(probs)), kind_(kind), gold_class_(gold_class) {}

  Vector probs_;
  LabelKind kind_;
  int gold_class_;
};

enum class Arch { kLinear, kMlp };
enum class ScheduleMode { kFirst, kLast, kNone };
enum class OptimizerKind { kSgd, kAdam };
enum class LossKind { kHard, kSoft };

std::string_view to_string(Arch arch);
std::string_view to_string(ScheduleMode mode);
std::string_view to_string(OptimizerKind kind);
std::string_view to_string(LossKind kind);

/// Hyperparameters for one teacher/student experiment.
///
/// The student schedule is (schedule_mode, warmup_epochs): kFirst with n = 2
/// is the hard-loss-first-two-epochs recipe, kLast puts the n hard-loss
/// epochs at the end, kNone trains on soft labels throughout.
struct RunConfig {
  double xi = 0.9;
  double alpha = 1.48;
  double beta = 0.2;
  int teacher_epochs = 5;
  int student_epochs = 5;
  int warmup_epochs = 2;
  ScheduleMode schedule_mode = ScheduleMode::kFirst;
  double learning_rate = 0.01;
  std::uint64_t seed = 42;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  Arch arch = Arch::kLinear;
  int hidden_size = 16;
  int batch_size = 32;

  /// Throws Error(kConfig) unless alpha > 1 + beta, xi + beta > 1, xi in
  /// (0, 1) and all counts/rates are in range.
  void validate() const;
};

enum class OodMode { kDecorrelated, kInverted };

std::string_view to_string(OodMode mode);

/// Generative parameters of the synthetic spurious-correlation benchmark.
///
/// Features are laid out as [signal_0 .. signal_{S-1}, shortcut_0 .. shortcut_{K-1}];
/// shortcut column c is the indicator designated for class c.
struct BiasedDatasetSpec {
  int num_classes = 3;
  int signal_features = 20;
  int shortcut_features = 3;
  double rho = 0.95;
  // Separation giving a signal-only Bayes accuracy of ~0.880 at K = 3.
  double signal_strength = 2.09;
  double noise_sigma = 1.0;
  int n_train = 10000;
  int n_id = 2000;
  int n_ood = 2000;
  OodMode ood_mode = OodMode::kDecorrelated;

  int num_features() const { return signal_features + shortcut_features; }
  int first_shortcut_column() const { return signal_features; }

  void validate() const;
};

}  // namespace softle
