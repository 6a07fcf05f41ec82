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
#include <limits>
#include <set>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "softle/checkpoint.hpp"
#include "softle/error.hpp"
#include "softle/io.hpp"
#include "softle/rng.hpp"
#include "test_support.hpp"

namespace softle {
namespace {

using ::testing::HasSubstr;
using testing::TempDir;

template <typename F>
std::string error_message(F&& body, ErrorCategory expected) {
  try {
    body();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), expected) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no softle::Error thrown";
  return {};
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, DifferentSeedsDiffer) {
  Rng a(42), b(43);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next() == b.next();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, SubstreamDependsOnlyOnSeedAndTag) {
  Rng root(7);
  const Rng fresh = root.substream("teacher/init");
  for (int i = 0; i < 50; ++i) root.next();
  Rng after = root.substream("teacher/init");
  Rng copy = fresh;
  for (int i = 0; i < 20; ++i) ASSERT_EQ(copy.next(), after.next());

  Rng data = Rng(7).substream("datagen/train");
  Rng init = Rng(7).substream("teacher/init");
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += data.next() == init.next();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, UniformAndBelowStayInRange) {
  Rng rng(1);
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  // chi-square with 6 dof; 22.46 is the 0.001 critical value.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  EXPECT_LT(chi2, 22.46);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(9);
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  rng.shuffle(v);
  std::set<int> seen(v.begin(), v.end());
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(v[0] + v[1] * 100, 0 + 1 * 100);
}

Sample make_sample(std::int64_t id, int gold, std::vector<double> f) {
  Sample s;
  s.id = id;
  s.gold_class = gold;
  s.features = Eigen::Map<Vector>(f.data(), static_cast<Eigen::Index>(f.size()));
  return s;
}

TEST(Dataset, RejectsInvariantViolations) {
  error_message([] { Dataset({make_sample(0, 0, {1, 2})}, 2, 3, SplitTag::kTrain); },
                ErrorCategory::kFormat);
  EXPECT_THAT(error_message([] { Dataset({make_sample(0, 2, {1, 2})}, 2, 2, SplitTag::kTrain); },
                            ErrorCategory::kFormat),
              HasSubstr("gold class"));
  EXPECT_THAT(error_message(
                  [] {
                    Dataset({make_sample(4, 0, {1, 2}), make_sample(4, 1, {1, 2})}, 2, 2,
                            SplitTag::kTrain);
                  },
                  ErrorCategory::kFormat),
              HasSubstr("duplicate id"));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THAT(error_message([&] { Dataset({make_sample(0, 0, {nan, 2})}, 2, 2, SplitTag::kTrain); },
                            ErrorCategory::kFormat),
              HasSubstr("non-finite feature"));
}

TEST(LabelVector, HardAndSoftLayout) {
  const LabelVector h = LabelVector::hard(1, 3);
  EXPECT_EQ(h.probs(), (Vector(4) << 0, 1, 0, 0).finished());
  EXPECT_EQ(h.kind(), LabelKind::kHard);
  EXPECT_EQ(h.dummy(), 0.0);

  const LabelVector s = LabelVector::soft(2, 3, 0.25);
  EXPECT_EQ(s.probs(), (Vector(4) << 0, 0, 0.75, 0.25).finished());
  EXPECT_EQ(s.num_classes(), 3);
  EXPECT_NEAR(s.probs().sum(), 1.0, 1e-15);

  error_message([] { LabelVector::soft(0, 3, 0.0); }, ErrorCategory::kConfig);
  error_message([] { LabelVector::soft(0, 3, 1.0); }, ErrorCategory::kConfig);
  error_message([] { LabelVector::hard(3, 3); }, ErrorCategory::kShape);
}

TEST(RunConfig, ValidationRules) {
  RunConfig ok;
  EXPECT_NO_THROW(ok.validate());
  RunConfig bad_alpha;
  bad_alpha.alpha = 1.2;  // == 1 + beta
  error_message([&] { bad_alpha.validate(); }, ErrorCategory::kConfig);
  RunConfig bad_xi;
  bad_xi.xi = 0.8;  // xi + beta == 1
  error_message([&] { bad_xi.validate(); }, ErrorCategory::kConfig);
  RunConfig bad_epochs;
  bad_epochs.student_epochs = 0;
  error_message([&] { bad_epochs.validate(); }, ErrorCategory::kConfig);
}

TEST(DatasetFile, ThreeRecordsParse) {
  const std::string text =
      "{\"K\":3,\"F\":4,\"split_tag\":\"train\"}\n"
      "{\"id\":0,\"gold\":0,\"features\":[1,2,3,4]}\n"
      "{\"id\":1,\"gold\":2,\"features\":[0.5,-1,0,1e-3]}\n"
      "{\"id\":2,\"gold\":1,\"features\":[0,0,0,0]}\n";
  const Dataset d = parse_dataset(text);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.num_classes(), 3);
  EXPECT_EQ(d.num_features(), 4);
  EXPECT_EQ(d[1].gold_class, 2);
  EXPECT_EQ(d[1].features[3], 1e-3);
  EXPECT_EQ(format_dataset(d), format_dataset(parse_dataset(format_dataset(d))));
}

TEST(DatasetFile, EmptyAndBadRecords) {
  EXPECT_THAT(error_message([] { parse_dataset(""); }, ErrorCategory::kFormat),
              HasSubstr("empty dataset"));
  EXPECT_THAT(error_message([] { parse_dataset("{\"K\":3,\"F\":1,\"split_tag\":\"train\"}\n"); },
                            ErrorCategory::kFormat),
              HasSubstr("empty dataset"));
  const std::string gold5 =
      "{\"K\":3,\"F\":1,\"split_tag\":\"train\"}\n"
      "{\"id\":0,\"gold\":0,\"features\":[1]}\n"
      "{\"id\":1,\"gold\":5,\"features\":[1]}\n";
  EXPECT_THAT(error_message([&] { parse_dataset(gold5); }, ErrorCategory::kFormat),
              HasSubstr("line 3"));
  const std::string dup =
      "{\"K\":3,\"F\":1,\"split_tag\":\"train\"}\n"
      "{\"id\":7,\"gold\":0,\"features\":[1]}\n"
      "{\"id\":7,\"gold\":1,\"features\":[1]}\n";
  EXPECT_THAT(error_message([&] { parse_dataset(dup); }, ErrorCategory::kFormat),
              HasSubstr("first on line 2"));
  error_message([] { parse_dataset("{\"K\":3,\"F\":1,\"split_tag\":\"dev\"}\n{}\n"); },
                ErrorCategory::kFormat);
}

TEST(DatasetFile, RoundTripIsBitExact) {
  Rng rng(11);
  std::vector<Sample> samples;
  const std::vector<double> awkward = {0.1, 1.0 / 3.0, -0.0, 5e-324, 1.7976931348623157e308,
                                       -2.2250738585072014e-308, 123456789.123456789};
  for (int i = 0; i < 200; ++i) {
    Sample s;
    s.id = 1000 - i;
    s.gold_class = static_cast<int>(rng.below(4));
    s.features = Vector(7);
    for (int j = 0; j < 7; ++j) s.features[j] = i == 0 ? awkward[j] : rng.normal() * std::exp(30 * rng.normal());
    samples.push_back(s);
  }
  const Dataset d(samples, 4, 7, SplitTag::kOodTest);
  TempDir dir;
  save_dataset(d, dir / "d.jsonl");
  const Dataset back = load_dataset(dir / "d.jsonl");
  ASSERT_EQ(back.size(), d.size());
  EXPECT_EQ(back.split_tag(), SplitTag::kOodTest);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back[i].id, d[i].id);
    EXPECT_EQ(back[i].gold_class, d[i].gold_class);
    for (int j = 0; j < 7; ++j) {
      EXPECT_EQ(std::signbit(back[i].features[j]), std::signbit(d[i].features[j]));
      EXPECT_EQ(back[i].features[j], d[i].features[j]);
    }
  }
}

TEST(DatasetFile, RefusesToWriteEmpty) {
  TempDir dir;
  error_message([&] { save_dataset(Dataset({}, 2, 2, SplitTag::kTrain), dir / "x"); },
                ErrorCategory::kFormat);
  EXPECT_FALSE(std::filesystem::exists(dir / "x"));
  EXPECT_FALSE(std::filesystem::exists(dir / "x.tmp"));
}

TEST(Io, MissingFileIsIoError) {
  error_message([] { read_file("/nonexistent/softle/file"); }, ErrorCategory::kIo);
}

TEST(Io, FormatDoubleRoundTrips) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
    ASSERT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(ConfigFile, DefaultsRoundTrip) {
  const ExperimentConfig def;
  const ExperimentConfig back = parse_config(format_config(def));
  EXPECT_EQ(format_config(back), format_config(def));
  EXPECT_EQ(back.run.xi, 0.9);
  EXPECT_EQ(back.run.alpha, 1.48);
  EXPECT_EQ(back.run.beta, 0.2);
  EXPECT_EQ(back.data.rho, 0.95);
  EXPECT_EQ(back.data.n_train, 10000);
}

TEST(ConfigFile, OverridesCommentsAndErrors) {
  const ExperimentConfig c = parse_config(
      "# tweak\n"
      "xi = 0.88   # FEVER setting\n"
      "\n"
      "schedule_mode = L\n"
      "data_ood_mode = inverted\n"
      "seed = 1234\n");
  EXPECT_EQ(c.run.xi, 0.88);
  EXPECT_EQ(c.run.schedule_mode, ScheduleMode::kLast);
  EXPECT_EQ(c.data.ood_mode, OodMode::kInverted);
  EXPECT_EQ(c.run.seed, 1234u);

  EXPECT_THAT(error_message([] { parse_config("gamma = 1\n"); }, ErrorCategory::kConfig),
              HasSubstr("unknown key"));
  EXPECT_THAT(error_message([] { parse_config("xi = 0.9\nxi = 0.9\n"); }, ErrorCategory::kConfig),
              HasSubstr("duplicate key"));
  error_message([] { parse_config("xi = abc\n"); }, ErrorCategory::kConfig);
  error_message([] { parse_config("xi 0.9\n"); }, ErrorCategory::kConfig);
}

TEST(Checkpoint, RoundTripIsExact) {
  Rng rng(21);
  for (Arch arch : {Arch::kLinear, Arch::kMlp}) {
    const ClassifierParams p = ClassifierParams::initialize(arch, 6, 4, 5, rng);
    RunConfig cfg;
    cfg.arch = arch;
    cfg.seed = 99;
    cfg.xi = 0.88;
    TempDir dir;
    save_checkpoint(p, cfg, dir / "m.ckpt");
    const Checkpoint back = load_checkpoint(dir / "m.ckpt");
    EXPECT_EQ(back.params, p);
    EXPECT_EQ(back.config.seed, 99u);
    EXPECT_EQ(back.config.xi, 0.88);
    EXPECT_EQ(format_checkpoint(back.params, back.config), format_checkpoint(p, cfg));
  }
}

TEST(Checkpoint, RejectsCorruptFiles) {
  error_message([] { parse_checkpoint("not json"); }, ErrorCategory::kFormat);
  error_message([] { parse_checkpoint("{\"format\":\"other\"}"); }, ErrorCategory::kFormat);
  Rng rng(1);
  const ClassifierParams p = ClassifierParams::initialize(Arch::kLinear, 3, 2, 0, rng);
  std::string text = format_checkpoint(p, RunConfig{});
  const auto pos = text.find("\"rows\":2");
  ASSERT_NE(pos, std::string::npos) << text.substr(0, 300);
  text.replace(pos, 8, "\"rows\":3");
  error_message([&] { parse_checkpoint(text); }, ErrorCategory::kFormat);
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
  TempDir dir;
  write_file_atomic(dir / "a.txt", "hello");
  EXPECT_EQ(read_file(dir / "a.txt"), "hello");
  EXPECT_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  error_message([&] { write_file_atomic(dir / "missing" / "a.txt", "x"); }, ErrorCategory::kIo);
}

}  // namespace
}  // namespace softle
