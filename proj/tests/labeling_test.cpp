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

#include <cmath>

#include <gtest/gtest.h>

#include "softle/error.hpp"
#include "softle/labeling.hpp"
#include "softle/pipeline.hpp"
#include "test_support.hpp"

namespace softle {
namespace {

using testing::Big;

double big_log_ratio(const char* sigma_plus_beta, const char* alpha) {
  return static_cast<double>(boost::multiprecision::log(Big(sigma_plus_beta)) /
                             boost::multiprecision::log(Big(alpha)));
}

TEST(ShortcutDegree, AppendixWorkedValue) {
  const RunConfig cfg;  // xi 0.9, alpha 1.48, beta 0.2
  const double s = shortcut_degree(0.99, cfg);
  EXPECT_EQ(std::round(s * 1000) / 1000, 0.444);
  EXPECT_NEAR(s, big_log_ratio("1.19", "1.48"), 1e-15);
}

TEST(ShortcutDegree, BelowThresholdIsZero) {
  const RunConfig cfg;
  EXPECT_EQ(shortcut_degree(0.5, cfg), 0.0);
  EXPECT_EQ(shortcut_degree(0.9, cfg), 0.0);  // not strictly above xi
  EXPECT_FALSE(annotate(3, 0.9, cfg).over_confident);
}

TEST(ShortcutDegree, ArbitraryPrecisionOracles) {
  const RunConfig cfg;
  const double at_one = shortcut_degree(1.0, cfg);
  EXPECT_NEAR(at_one, big_log_ratio("1.2", "1.48"), 1e-15);
  EXPECT_NEAR(at_one, 0.46506, 5e-6);

  const double at_edge = shortcut_degree(0.9000001, cfg);
  EXPECT_NEAR(at_edge, big_log_ratio("1.1000001", "1.48"), 1e-14);
  EXPECT_NEAR(at_edge, 0.24311, 5e-6);
}

TEST(ShortcutDegree, RejectsConfidenceOutsideUnitInterval) {
  const RunConfig cfg;
  EXPECT_THROW(shortcut_degree(1.0000001, cfg), Error);
  EXPECT_THROW(shortcut_degree(-0.1, cfg), Error);
  EXPECT_THROW(shortcut_degree(std::nan(""), cfg), Error);
}

TEST(ShortcutDegree, MonotoneAndInRangeOnSweep) {
  const RunConfig cfg;
  double previous = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double sigma = cfg.xi + (1.0 - cfg.xi) * i / 1000.0;
    const double s = shortcut_degree(sigma, cfg);
    ASSERT_GT(s, 0.0) << sigma;
    ASSERT_LT(s, 1.0) << sigma;
    ASSERT_GT(1.0 - s, 0.0);
    if (i > 1) {
      ASSERT_GT(s, previous) << sigma;
    }
    previous = s;
  }
}

TEST(ShortcutDegree, RangeHoldsForRandomValidConfigs) {
  Rng rng(17);
  int checked = 0;
  while (checked < 2000) {
    RunConfig cfg;
    cfg.beta = rng.uniform(0.0, 0.6);
    cfg.xi = rng.uniform(0.5, 0.99);
    cfg.alpha = 1.0 + cfg.beta + rng.uniform(1e-6, 2.0);
    if (!(cfg.xi + cfg.beta > 1.0)) continue;
    for (int t = 0; t < 10; ++t) {
      const double sigma = cfg.xi + (1.0 - cfg.xi) * (1.0 - rng.uniform());
      const double s = shortcut_degree(sigma, cfg);
      ASSERT_GT(s, 0.0);
      ASSERT_LT(s, 1.0);
    }
    ++checked;
  }
}

TEST(LabelEncoding, WorkedExamples) {
  const RunConfig cfg;
  const LabelVector a = label_for(annotate(0, 0.99, cfg), 1, 3);
  ASSERT_EQ(a.probs().size(), 4);
  EXPECT_EQ(a.probs()[0], 0.0);
  EXPECT_NEAR(a.probs()[1], 0.556, 5e-4);
  EXPECT_EQ(a.probs()[2], 0.0);
  EXPECT_NEAR(a.probs()[3], 0.444, 5e-4);
  EXPECT_EQ(a.kind(), LabelKind::kSoft);

  const LabelVector b = label_for(annotate(0, 0.5, cfg), 1, 3);
  EXPECT_EQ(b.probs(), LabelVector::hard(1, 3).probs());

  const LabelVector c = label_for(annotate(0, 1.0, cfg), 0, 3);
  const double s = big_log_ratio("1.2", "1.48");
  EXPECT_NEAR(c.probs()[0], 1.0 - s, 1e-15);
  EXPECT_NEAR(c.probs()[0], 0.53494, 5e-6);
  EXPECT_NEAR(c.probs()[3], 0.46506, 5e-6);
  EXPECT_EQ(c.probs()[1], 0.0);
  EXPECT_EQ(c.probs()[2], 0.0);
}

TEST(LabelEncoding, PropertyOverTenThousandCases) {
  const RunConfig cfg;
  Rng rng(2024);
  int soft = 0;
  for (int t = 0; t < 10000; ++t) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const int gold = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    // Half the draws land above the threshold so both branches get exercised.
    const double sigma = rng.bernoulli(0.5) ? rng.uniform() : cfg.xi + (1 - cfg.xi) * (1 - rng.uniform());
    const ShortcutAnnotation a = annotate(t, sigma, cfg);
    const LabelVector y = label_for(a, gold, k);
    ASSERT_EQ(y.probs().size(), k + 1);
    ASSERT_NEAR(y.probs().sum(), 1.0, 1e-9);
    ASSERT_EQ(a.over_confident, sigma > cfg.xi);
    ASSERT_EQ(a.shortcut_degree > 0.0, a.over_confident);
    if (!a.over_confident) {
      Vector one_hot = Vector::Zero(k + 1);
      one_hot[gold] = 1.0;
      ASSERT_EQ(y.probs(), one_hot);  // bitwise
      ASSERT_EQ(y.dummy(), 0.0);
    } else {
      ++soft;
      ASSERT_EQ(a.shortcut_degree, std::log(sigma + cfg.beta) / std::log(cfg.alpha));
      ASSERT_EQ(y.dummy(), a.shortcut_degree);
      ASSERT_EQ(y.probs()[gold], 1.0 - a.shortcut_degree);
      for (int j = 0; j < k; ++j) {
        if (j != gold) {
          ASSERT_EQ(y.probs()[j], 0.0);
        }
      }
    }
  }
  EXPECT_GT(soft, 4000);
}

class Encoding : public ::testing::Test {
 protected:
  Dataset train = testing::random_dataset(300, 3, 6, 5);
  RunConfig cfg = testing::quick_config();
  ClassifierParams teacher = train_teacher(train, cfg).params;
};

TEST_F(Encoding, UsesGoldClassConfidenceAndIsDeterministic) {
  const ClassifierParams frozen = teacher;
  const auto first = encode_labels(train, teacher, cfg);
  const auto second = encode_labels(train, teacher, cfg);
  EXPECT_EQ(teacher, frozen);
  ASSERT_EQ(first.size(), train.size());
  int over = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].annotation, second[i].annotation);
    EXPECT_EQ(first[i].label.probs(), second[i].label.probs());
    const double sigma = forward(teacher, train[i].features).probs[train[i].gold_class];
    EXPECT_EQ(first[i].annotation.teacher_confidence, sigma);
    EXPECT_EQ(first[i].annotation.sample_id, train[i].id);
    over += first[i].annotation.over_confident;
  }
  EXPECT_GT(over, 0);
}

TEST_F(Encoding, AnnotationsRoundTripAndRebuildLabels) {
  const auto encoded = encode_labels(train, teacher, cfg);
  testing::TempDir dir;
  save_annotations(annotations_of(encoded), dir / "a.jsonl");
  const auto back = load_annotations(dir / "a.jsonl");
  ASSERT_EQ(back, annotations_of(encoded));
  const auto rebuilt = labels_from_annotations(train, back, cfg);
  const auto direct = labels_of(encoded);
  for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_EQ(rebuilt[i].probs(), direct[i].probs());

  // A stricter threshold turns fewer samples soft without re-encoding.
  RunConfig strict = cfg;
  strict.xi = 0.99;
  int soft_default = 0, soft_strict = 0;
  const auto relabelled = labels_from_annotations(train, back, strict);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    soft_default += direct[i].kind() == LabelKind::kSoft;
    soft_strict += relabelled[i].kind() == LabelKind::kSoft;
  }
  EXPECT_LE(soft_strict, soft_default);
}

TEST_F(Encoding, MismatchedAnnotationsAreRejected) {
  auto annotations = annotations_of(encode_labels(train, teacher, cfg));
  std::swap(annotations[0], annotations[1]);
  EXPECT_THROW(labels_from_annotations(train, annotations, cfg), Error);
  annotations.pop_back();
  EXPECT_THROW(labels_from_annotations(train, annotations, cfg), Error);
}

TEST_F(Encoding, WrongTeacherArityIsRejected) {
  Rng rng(1);
  const ClassifierParams wrong = ClassifierParams::initialize(Arch::kLinear, 6, 4, 0, rng);
  EXPECT_THROW(encode_labels(train, wrong, cfg), Error);
}

TEST(AnnotationFile, RejectsMalformedLines) {
  EXPECT_THROW(parse_annotations("{\"id\":1,\"sigma\":1.5,\"s\":0}\n"), Error);
  EXPECT_THROW(parse_annotations("{\"id\":1,\"sigma\":0.5}\n"), Error);
  EXPECT_THROW(parse_annotations("nope\n"), Error);
  const auto ok = parse_annotations("{\"id\":4,\"sigma\":0.95,\"s\":0.3}\n\n");
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_TRUE(ok[0].over_confident);
}

}  // namespace
}  // namespace softle
