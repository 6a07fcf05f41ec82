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

#include "softle/datagen.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "softle/error.hpp"
#include "softle/rng.hpp"

namespace softle {

namespace {

double match_probability(const BiasedDatasetSpec& spec, SplitTag tag) {
  if (tag != SplitTag::kOodTest) return spec.rho;
  return spec.ood_mode == OodMode::kDecorrelated ? 1.0 / spec.num_classes : 1.0 - spec.rho;
}

int draw_shortcut(Rng& rng, double match_prob, int num_classes, int gold) {
  if (rng.bernoulli(match_prob)) return gold;
  // Uniform over the K - 1 other classes.
  int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_classes - 1)));
  if (other >= gold) ++other;
  return other;
}

Dataset draw_split(const BiasedDatasetSpec& spec, SplitTag tag, int count, std::int64_t first_id,
                   Rng rng) {
  const int k = spec.num_classes;
  std::vector<Vector> means;
  for (int c = 0; c < k; ++c) means.push_back(spec.signal_strength * signal_direction(spec, c));
  const double match = match_probability(spec, tag);

  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Sample s;
    s.id = first_id + i;
    s.gold_class = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    s.features = Vector::Zero(spec.num_features());
    for (int j = 0; j < spec.signal_features; ++j) {
      s.features[j] = means[s.gold_class][j] + spec.noise_sigma * rng.normal();
    }
    const int fired = draw_shortcut(rng, match, k, s.gold_class);
    s.features[spec.first_shortcut_column() + fired] = 1.0;
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), k, spec.num_features(), tag);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

Vector signal_direction(const BiasedDatasetSpec& spec, int c) {
  Vector u = Vector::Zero(spec.signal_features);
  int members = 0;
  for (int j = c; j < spec.signal_features; j += spec.num_classes) ++members;
  const double v = 1.0 / std::sqrt(static_cast<double>(members));
  for (int j = c; j < spec.signal_features; j += spec.num_classes) u[j] = v;
  return u;
}

GeneratedSplits generate(const BiasedDatasetSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Rng root(seed);
  const std::int64_t id_base = spec.n_train;
  const std::int64_t ood_base = id_base + spec.n_id;
  return GeneratedSplits{
      draw_split(spec, SplitTag::kTrain, spec.n_train, 0, root.substream("datagen/train")),
      draw_split(spec, SplitTag::kIdTest, spec.n_id, id_base, root.substream("datagen/id_test")),
      draw_split(spec, SplitTag::kOodTest, spec.n_ood, ood_base, root.substream("datagen/ood_test")),
  };
}

BayesEstimate bayes_accuracy(const BiasedDatasetSpec& spec, EvalSplit split, FeatureSet features) {
  spec.validate();
  const int k = spec.num_classes;
  const SplitTag tag = split == EvalSplit::kId ? SplitTag::kIdTest : SplitTag::kOodTest;
  const double eval_match = match_probability(spec, tag);
  const double separation = spec.signal_strength / spec.noise_sigma;

  switch (features) {
    case FeatureSet::kShortcutOnly:
      // The training-optimal rule follows the fired indicator (rho >= 1/K), so
      // it is right exactly when the gold indicator fired.
      return {eval_match, 0.0};

    case FeatureSet::kSignalOnly: {
      // Projections onto the orthonormal class directions are independent:
      // gold ~ N(d, 1), others ~ N(0, 1) after scaling by sigma.
      auto integrand = [&](double z) {
        return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI) *
               std::pow(normal_cdf(z + separation), k - 1);
      };
      const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), 15, 1e-14);
      return {value, 0.0};
    }

    case FeatureSet::kAll: {
      constexpr long kDraws = 1'000'000;
      Rng rng = Rng(0x5eed'ba7e5ULL).substream("bayes/all");
      const double log_match = std::log(spec.rho);
      const double log_other = k > 1 ? std::log((1.0 - spec.rho) / (k - 1))
                                     : -std::numeric_limits<double>::infinity();
      std::vector<double> t(static_cast<std::size_t>(k));
      long correct = 0;
      for (long i = 0; i < kDraws; ++i) {
        const int gold = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        for (int c = 0; c < k; ++c) t[c] = (c == gold ? separation : 0.0) + rng.normal();
        const int fired = draw_shortcut(rng, eval_match, k, gold);
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          // log N(x | mu_c) up to a class-independent constant, in units of sigma.
          const double score = separation * t[c] + (c == fired ? log_match : log_other);
          if (score > best_score) {
            best_score = score;
            best = c;
          }
        }
        if (best == gold) ++correct;
      }
      const double p = static_cast<double>(correct) / kDraws;
      return {p, std::sqrt(p * (1.0 - p) / kDraws)};
    }
  }
  return {};
}

}  // namespace softle
