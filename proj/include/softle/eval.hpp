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

#include <array>
#include <optional>
#include <string>

#include "softle/checkpoint.hpp"
#include "softle/model.hpp"
#include "softle/types.hpp"

namespace softle {

/// Index of the largest entry; ties go to the lowest index.
int argmax_lowest(const Vector& values);

/// Probabilities over the K task classes. A K-output model is returned as-is;
/// a (K+1)-output student has its dummy dropped and the rest renormalized.
/// Any other arity throws kShape.
Vector task_probabilities(const ClassifierParams& model, const Vector& x, int num_classes);

/// Predicted task class. For students this ignores the dummy class.
int predict(const ClassifierParams& model, const Vector& x, int num_classes);

/// Fraction of samples predicted correctly. With `use_dummy_exclusion` a
/// student predicts over its first K classes; without it the argmax runs over
/// every output, so a dummy prediction counts as an error.
double accuracy(const ClassifierParams& model, const Dataset& dataset, bool use_dummy_exclusion);

/// Fraction of samples whose top task-class confidence exceeds `xi`.
double overconfidence_ratio(const ClassifierParams& model, const Dataset& dataset, double xi);

/// Ten equal-width bins over [0, 1]; bin i covers [i/10, (i+1)/10) and the
/// last bin is closed at 1.
struct ConfidenceHistogram {
  static constexpr int kBins = 10;
  std::array<long, kBins> counts{};

  static int bin_of(double confidence);
  static double bin_low(int bin) { return static_cast<double>(bin) / kBins; }
  static double bin_high(int bin) { return static_cast<double>(bin + 1) / kBins; }
  long total() const;
  /// counts[i] / total(), all zero when empty.
  std::array<double, kBins> fractions() const;
  /// Fraction of mass strictly above 0.9 confidence, i.e. the top bin.
  double top_bin_fraction() const;
};

/// Histogram of top task-class confidence over misclassified samples only.
ConfidenceHistogram misclassified_confidence_histogram(const ClassifierParams& model,
                                                       const Dataset& dataset);

/// For a linear model: per task-class row, sum |w| over shortcut columns
/// divided by sum |w| over all columns, averaged over rows. The dummy row of
/// a student is skipped. Throws kShape for non-linear models.
double shortcut_weight_mass(const ClassifierParams& model, const BiasedDatasetSpec& spec);

struct SplitMetrics {
  double accuracy = 0.0;
  double overconfidence_ratio = 0.0;
  ConfidenceHistogram misclassified_histogram;
};

struct EvalReport {
  std::string method;
  SplitMetrics id;
  SplitMetrics ood;
  double avg_accuracy = 0.0;  // (id + ood) / 2
  std::optional<double> shortcut_weight_mass;
  RunConfig config;
};

EvalReport evaluate(const ClassifierParams& model, const std::string& method,
                    const Dataset& id_test, const Dataset& ood_test, const RunConfig& config,
                    const BiasedDatasetSpec* spec);

ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// One row per report: method,id_accuracy,ood_accuracy,avg_accuracy,...
std::string metrics_csv(const std::vector<EvalReport>& reports);

/// Rows of method,split,bin_low,bin_high,count for external plotting.
std::string histogram_csv(const std::vector<EvalReport>& reports);

}  // namespace softle
