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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "softle/model.hpp"
#include "softle/types.hpp"

namespace softle {

/// What the frozen teacher says about one training sample.
struct ShortcutAnnotation {
  std::int64_t sample_id = 0;
  double teacher_confidence = 0.0;  // teacher probability on the gold class
  bool over_confident = false;      // teacher_confidence > xi
  double shortcut_degree = 0.0;     // log_alpha(confidence + beta), or 0

  friend bool operator==(const ShortcutAnnotation&, const ShortcutAnnotation&) = default;
};

/// log_alpha(sigma + beta) when sigma > xi, else 0. With a validated config
/// the non-zero branch lies strictly inside (0, 1).
double shortcut_degree(double sigma, const RunConfig& config);

/// Builds the annotation for a given gold-class confidence.
ShortcutAnnotation annotate(std::int64_t sample_id, double sigma, const RunConfig& config);

/// K+1 target for a sample: soft when over-confident, hard (dummy 0) otherwise.
LabelVector label_for(const ShortcutAnnotation& annotation, int gold_class, int num_classes);

struct EncodedSample {
  ShortcutAnnotation annotation;
  LabelVector label;
};

/// Runs the frozen teacher over `train` and encodes every sample. Output order
/// follows `train`. Throws kShape if the teacher does not have K outputs.
std::vector<EncodedSample> encode_labels(const Dataset& train, const ClassifierParams& teacher,
                                         const RunConfig& config);

std::vector<LabelVector> labels_of(const std::vector<EncodedSample>& encoded);
std::vector<ShortcutAnnotation> annotations_of(const std::vector<EncodedSample>& encoded);

/// Rebuilds the K+1 targets from persisted annotations. Annotations must be
/// in the same order as `train` and carry matching ids. The shortcut degree is
/// recomputed from the stored confidence under `config`.
std::vector<LabelVector> labels_from_annotations(const Dataset& train,
                                                 const std::vector<ShortcutAnnotation>& annotations,
                                                 const RunConfig& config);

// Annotation files hold one JSON object per line: {"id":7,"sigma":0.99,"s":0.444...}.

std::string format_annotations(const std::vector<ShortcutAnnotation>& annotations);
std::vector<ShortcutAnnotation> parse_annotations(std::string_view text);
void save_annotations(const std::vector<ShortcutAnnotation>& annotations,
                      const std::filesystem::path& path);
std::vector<ShortcutAnnotation> load_annotations(const std::filesystem::path& path);

}  // namespace softle
