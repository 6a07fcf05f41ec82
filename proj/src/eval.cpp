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

#include "softle/eval.hpp"

#include <cmath>
#include <sstream>

#include "softle/error.hpp"
#include "softle/io.hpp"

namespace softle {

int argmax_lowest(const Vector& values) {
  int best = 0;
  for (Eigen::Index j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = static_cast<int>(j);
  }
  return best;
}

Vector task_probabilities(const ClassifierParams& model, const Vector& x, int num_classes) {
  const int outputs = model.num_outputs();
  if (outputs != num_classes && outputs != num_classes + 1) {
    fail(ErrorCategory::kShape, "model has " + std::to_string(outputs) + " outputs, expected " +
                                    std::to_string(num_classes) + " or " +
                                    std::to_string(num_classes + 1));
  }
  const ForwardResult fwd = forward(model, x);
  if (outputs == num_classes) return fwd.probs;
  // Renormalizing from logits keeps precision when the dummy dominates.
  return softmax(fwd.logits.head(num_classes));
}

int predict(const ClassifierParams& model, const Vector& x, int num_classes) {
  return argmax_lowest(task_probabilities(model, x, num_classes));
}

double accuracy(const ClassifierParams& model, const Dataset& dataset, bool use_dummy_exclusion) {
  const int k = dataset.num_classes();
  long correct = 0;
  for (const Sample& s : dataset.samples()) {
    int predicted;
    if (use_dummy_exclusion) {
      predicted = predict(model, s.features, k);
    } else {
      if (model.num_outputs() != k && model.num_outputs() != k + 1) {
        fail(ErrorCategory::kShape, "model arity does not match dataset classes");
      }
      predicted = argmax_lowest(forward(model, s.features).probs);
    }
    if (predicted == s.gold_class) ++correct;
  }
  return dataset.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(dataset.size());
}

double overconfidence_ratio(const ClassifierParams& model, const Dataset& dataset, double xi) {
  const int k = dataset.num_classes();
  long over = 0;
  for (const Sample& s : dataset.samples()) {
    if (task_probabilities(model, s.features, k).maxCoeff() > xi) ++over;
  }
  return dataset.empty() ? 0.0 : static_cast<double>(over) / static_cast<double>(dataset.size());
}

int ConfidenceHistogram::bin_of(double confidence) {
  const int bin = static_cast<int>(std::floor(confidence * kBins));
  return std::clamp(bin, 0, kBins - 1);
}

long ConfidenceHistogram::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

std::array<double, ConfidenceHistogram::kBins> ConfidenceHistogram::fractions() const {
  std::array<double, kBins> f{};
  const long t = total();
  if (t == 0) return f;
  for (int i = 0; i < kBins; ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(t);
  return f;
}

double ConfidenceHistogram::top_bin_fraction() const { return fractions()[kBins - 1]; }

ConfidenceHistogram misclassified_confidence_histogram(const ClassifierParams& model,
                                                       const Dataset& dataset) {
  const int k = dataset.num_classes();
  ConfidenceHistogram h;
  for (const Sample& s : dataset.samples()) {
    const Vector p = task_probabilities(model, s.features, k);
    if (argmax_lowest(p) == s.gold_class) continue;
    ++h.counts[ConfidenceHistogram::bin_of(p.maxCoeff())];
  }
  return h;
}

double shortcut_weight_mass(const ClassifierParams& model, const BiasedDatasetSpec& spec) {
  if (model.arch != Arch::kLinear) {
    fail(ErrorCategory::kShape, "shortcut weight mass is defined for linear models only");
  }
  if (model.num_inputs() != spec.num_features()) {
    fail(ErrorCategory::kShape, "model inputs do not match the dataset spec's feature count");
  }
  const int k = spec.num_classes;
  if (model.num_outputs() != k && model.num_outputs() != k + 1) {
    fail(ErrorCategory::kShape, "model arity does not match the dataset spec's classes");
  }
  const Matrix& w = model.layers[0].weights;
  const int first = spec.first_shortcut_column();
  double sum = 0.0;
  for (int row = 0; row < k; ++row) {
    const double all = w.row(row).cwiseAbs().sum();
    const double shortcut = w.row(row).segment(first, spec.shortcut_features).cwiseAbs().sum();
    sum += all > 0.0 ? shortcut / all : 0.0;
  }
  return sum / k;
}

namespace {

SplitMetrics split_metrics(const ClassifierParams& model, const Dataset& data, double xi) {
  SplitMetrics m;
  m.accuracy = accuracy(model, data, true);
  m.overconfidence_ratio = overconfidence_ratio(model, data, xi);
  m.misclassified_histogram = misclassified_confidence_histogram(model, data);
  return m;
}

ordered_json split_to_json(const SplitMetrics& m) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["overconfidence_ratio"] = m.overconfidence_ratio;
  ordered_json bins = ordered_json::array();
  for (int i = 0; i < ConfidenceHistogram::kBins; ++i) {
    ordered_json b;
    b["bin_low"] = ConfidenceHistogram::bin_low(i);
    b["bin_high"] = ConfidenceHistogram::bin_high(i);
    b["count"] = m.misclassified_histogram.counts[i];
    bins.push_back(std::move(b));
  }
  j["misclassified_confidence_histogram"] = std::move(bins);
  return j;
}

}  // namespace

EvalReport evaluate(const ClassifierParams& model, const std::string& method,
                    const Dataset& id_test, const Dataset& ood_test, const RunConfig& config,
                    const BiasedDatasetSpec* spec) {
  EvalReport r;
  r.method = method;
  r.config = config;
  r.id = split_metrics(model, id_test, config.xi);
  r.ood = split_metrics(model, ood_test, config.xi);
  r.avg_accuracy = (r.id.accuracy + r.ood.accuracy) / 2.0;
  if (spec != nullptr && model.arch == Arch::kLinear) {
    r.shortcut_weight_mass = shortcut_weight_mass(model, *spec);
  }
  return r;
}

ordered_json report_to_json(const EvalReport& r) {
  ordered_json j;
  j["method"] = r.method;
  j["id_accuracy"] = r.id.accuracy;
  j["ood_accuracy"] = r.ood.accuracy;
  j["avg_accuracy"] = r.avg_accuracy;
  j["overconfidence_ratio"] = {{"id_test", r.id.overconfidence_ratio},
                               {"ood_test", r.ood.overconfidence_ratio}};
  j["splits"] = {{"id_test", split_to_json(r.id)}, {"ood_test", split_to_json(r.ood)}};
  if (r.shortcut_weight_mass) {
    j["shortcut_weight_mass"] = *r.shortcut_weight_mass;
  } else {
    j["shortcut_weight_mass"] = nullptr;
  }
  j["metadata"] = {{"seed", r.config.seed}, {"method", r.method},
                   {"config", run_config_to_json(r.config)}};
  return j;
}

namespace {

SplitMetrics split_from_json(const nlohmann::json& j) {
  SplitMetrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.overconfidence_ratio = j.at("overconfidence_ratio").get<double>();
  const auto& bins = j.at("misclassified_confidence_histogram");
  if (bins.size() != ConfidenceHistogram::kBins) fail(ErrorCategory::kFormat, "report: histogram needs 10 bins");
  for (int i = 0; i < ConfidenceHistogram::kBins; ++i) {
    m.misclassified_histogram.counts[i] = bins[static_cast<std::size_t>(i)].at("count").get<long>();
  }
  return m;
}

}  // namespace

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.method = j.at("method").get<std::string>();
    r.id = split_from_json(j.at("splits").at("id_test"));
    r.ood = split_from_json(j.at("splits").at("ood_test"));
    r.avg_accuracy = j.at("avg_accuracy").get<double>();
    if (!j.at("shortcut_weight_mass").is_null()) {
      r.shortcut_weight_mass = j.at("shortcut_weight_mass").get<double>();
    }
    r.config = run_config_from_json(j.at("metadata").at("config"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kFormat, std::string("report: ") + e.what());
  }
}

std::string metrics_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "method,id_accuracy,ood_accuracy,avg_accuracy,id_overconfidence_ratio,"
         "ood_overconfidence_ratio,id_misclassified_top_bin,ood_misclassified_top_bin,"
         "shortcut_weight_mass\n";
  for (const auto& r : reports) {
    out << r.method << ',' << format_double(r.id.accuracy) << ',' << format_double(r.ood.accuracy)
        << ',' << format_double(r.avg_accuracy) << ',' << format_double(r.id.overconfidence_ratio)
        << ',' << format_double(r.ood.overconfidence_ratio) << ','
        << format_double(r.id.misclassified_histogram.top_bin_fraction()) << ','
        << format_double(r.ood.misclassified_histogram.top_bin_fraction()) << ','
        << (r.shortcut_weight_mass ? format_double(*r.shortcut_weight_mass) : std::string("NA"))
        << '\n';
  }
  return out.str();
}

std::string histogram_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "method,split,bin_low,bin_high,count\n";
  for (const auto& r : reports) {
    for (const auto& [split, m] : {std::pair{"id_test", &r.id}, std::pair{"ood_test", &r.ood}}) {
      for (int i = 0; i < ConfidenceHistogram::kBins; ++i) {
        out << r.method << ',' << split << ',' << format_double(ConfidenceHistogram::bin_low(i))
            << ',' << format_double(ConfidenceHistogram::bin_high(i)) << ','
            << m->misclassified_histogram.counts[i] << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace softle
