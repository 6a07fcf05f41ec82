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

#include "softle/types.hpp"

namespace softle {

struct GeneratedSplits {
  Dataset train;
  Dataset id_test;
  Dataset ood_test;
};

/// Draws the three splits of the synthetic benchmark.
///
/// Gold labels are uniform over K. Signal features are N(mu_gold, sigma^2 I)
/// where mu_c has norm `signal_strength` spread evenly over the signal columns
/// j with j % K == c, so class means are mutually orthogonal.
///
/// Exactly one shortcut indicator fires per sample. In train/ID it is the
/// gold class's indicator with probability rho and each other class's with
/// probability (1 - rho)/(K - 1). In OOD it is uniform over classes
/// (decorrelated) or the gold indicator with probability 1 - rho and each other
/// with rho/(K - 1) (inverted).
///
/// Each split reads its own substream ("datagen/train", "datagen/id_test",
/// "datagen/ood_test") of `seed`. Sample ids are unique across all splits.
GeneratedSplits generate(const BiasedDatasetSpec& spec, std::uint64_t seed);

enum class EvalSplit { kId, kOod };
enum class FeatureSet { kSignalOnly, kShortcutOnly, kAll };

struct BayesEstimate {
  double accuracy = 0.0;
  double std_error = 0.0;  // zero for closed-form and quadrature results
};

/// Accuracy on `split` of the Bayes-optimal classifier for the training
/// distribution restricted to `features`; i.e. what a perfect learner fitted
/// on train/ID data would score. Shortcut-only is closed form, signal-only
/// uses one-dimensional quadrature, and all-features uses 10^6 Monte-Carlo
/// draws (with standard error) from a fixed internal seed.
BayesEstimate bayes_accuracy(const BiasedDatasetSpec& spec, EvalSplit split, FeatureSet features);

/// Unit direction of class c's signal mean inside the signal block.
Vector signal_direction(const BiasedDatasetSpec& spec, int c);

}  // namespace softle
