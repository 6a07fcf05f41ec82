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

#include "softle/labeling.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "softle/error.hpp"
#include "softle/io.hpp"

namespace softle {

double shortcut_degree(double sigma, const RunConfig& config) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    fail(ErrorCategory::kShape, "teacher confidence outside [0, 1]");
  }
  if (!(sigma > config.xi)) return 0.0;
  return std::log(sigma + config.beta) / std::log(config.alpha);
}

ShortcutAnnotation annotate(std::int64_t sample_id, double sigma, const RunConfig& config) {
  ShortcutAnnotation a;
  a.sample_id = sample_id;
  a.teacher_confidence = sigma;
  a.over_confident = sigma > config.xi;
  a.shortcut_degree = shortcut_degree(sigma, config);
  return a;
}

LabelVector label_for(const ShortcutAnnotation& annotation, int gold_class, int num_classes) {
  if (annotation.over_confident) {
    return LabelVector::soft(gold_class, num_classes, annotation.shortcut_degree);
  }
  return LabelVector::hard(gold_class, num_classes);
}

std::vector<EncodedSample> encode_labels(const Dataset& train, const ClassifierParams& teacher,
                                         const RunConfig& config) {
  const int k = train.num_classes();
  if (teacher.num_outputs() != k) {
    fail(ErrorCategory::kShape, "teacher has " + std::to_string(teacher.num_outputs()) +
                                    " outputs, dataset has " + std::to_string(k) + " classes");
  }
  std::vector<EncodedSample> out;
  out.reserve(train.size());
  for (const Sample& s : train.samples()) {
    const ForwardResult fwd = forward(teacher, s.features);
    const double sigma = fwd.probs[s.gold_class];
    ShortcutAnnotation a = annotate(s.id, sigma, config);
    if (a.over_confident) {
      Eigen::Index argmax = 0;
      fwd.probs.maxCoeff(&argmax);
      // Holds automatically for xi >= 0.5; lower thresholds could break it.
      if (argmax != s.gold_class) {
        fail(ErrorCategory::kConfig, "over-confident sample " + std::to_string(s.id) +
                                         " whose gold class is not the teacher argmax; raise xi");
      }
    }
    LabelVector label = label_for(a, s.gold_class, k);
    out.push_back(EncodedSample{a, std::move(label)});
  }
  return out;
}

std::vector<LabelVector> labels_of(const std::vector<EncodedSample>& encoded) {
  std::vector<LabelVector> out;
  out.reserve(encoded.size());
  for (const auto& e : encoded) out.push_back(e.label);
  return out;
}

std::vector<ShortcutAnnotation> annotations_of(const std::vector<EncodedSample>& encoded) {
  std::vector<ShortcutAnnotation> out;
  out.reserve(encoded.size());
  for (const auto& e : encoded) out.push_back(e.annotation);
  return out;
}

std::vector<LabelVector> labels_from_annotations(const Dataset& train,
                                                 const std::vector<ShortcutAnnotation>& annotations,
                                                 const RunConfig& config) {
  if (annotations.size() != train.size()) {
    fail(ErrorCategory::kShape, "annotations cover " + std::to_string(annotations.size()) +
                                    " samples, dataset has " + std::to_string(train.size()));
  }
  std::vector<LabelVector> labels;
  labels.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Sample& s = train[i];
    if (annotations[i].sample_id != s.id) {
      fail(ErrorCategory::kShape, "annotation " + std::to_string(i) + " has id " +
                                      std::to_string(annotations[i].sample_id) + ", sample has id " +
                                      std::to_string(s.id));
    }
    // Recompute from sigma so a config change (xi, alpha, beta) is honoured.
    const ShortcutAnnotation a = annotate(s.id, annotations[i].teacher_confidence, config);
    labels.push_back(label_for(a, s.gold_class, train.num_classes()));
  }
  return labels;
}

std::string format_annotations(const std::vector<ShortcutAnnotation>& annotations) {
  std::string out;
  for (const auto& a : annotations) {
    out += "{\"id\":" + std::to_string(a.sample_id) + ",\"sigma\":" +
           format_double(a.teacher_confidence) + ",\"s\":" + format_double(a.shortcut_degree) +
           "}\n";
  }
  return out;
}

std::vector<ShortcutAnnotation> parse_annotations(std::string_view text) {
  std::vector<ShortcutAnnotation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "annotations line " + std::to_string(line_no) + ": ";
    ShortcutAnnotation a;
    try {
      const auto j = nlohmann::json::parse(line);
      a.sample_id = j.at("id").get<std::int64_t>();
      a.teacher_confidence = j.at("sigma").get<double>();
      a.shortcut_degree = j.at("s").get<double>();
      a.over_confident = a.shortcut_degree > 0.0;
      if (!(a.teacher_confidence >= 0.0 && a.teacher_confidence <= 1.0)) {
        fail(ErrorCategory::kFormat, "sigma outside [0, 1]");
      }
      if (!(a.shortcut_degree >= 0.0 && a.shortcut_degree < 1.0)) {
        fail(ErrorCategory::kFormat, "s outside [0, 1)");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCategory::kFormat, where + e.what());
    } catch (const Error& e) {
      fail(ErrorCategory::kFormat, where + e.what());
    }
    out.push_back(a);
  }
  return out;
}

void save_annotations(const std::vector<ShortcutAnnotation>& annotations,
                      const std::filesystem::path& path) {
  write_file_atomic(path, format_annotations(annotations));
}

std::vector<ShortcutAnnotation> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path));
}

}  // namespace softle
