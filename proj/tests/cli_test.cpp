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

#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "softle/io.hpp"
#include "test_support.hpp"

namespace softle::cli {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;
namespace fs = std::filesystem;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = dispatch(args, out, err);
  return {status, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    write_file_atomic(dir / "small.cfg",
                      "teacher_epochs = 2\nstudent_epochs = 3\n"
                      "data_n_train = 400\ndata_n_id = 100\ndata_n_ood = 100\n");
  }
  std::string cfg() const { return (dir / "small.cfg").string(); }
  std::string out(const std::string& name) const { return (dir / name).string(); }
  testing::TempDir dir;
};

void expect_one_error_line(const Result& r, const std::string& category) {
  EXPECT_THAT(r.err, StartsWith("error: " + category + ": "));
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
}

TEST_F(Cli, UnknownVerbIsUsageError) {
  const Result r = run({"train-everything"});
  EXPECT_EQ(r.status, kExitUsage);
  expect_one_error_line(r, "usage");
  EXPECT_EQ(run({}).status, kExitUsage);
  EXPECT_EQ(run({"run-all", "--no-such-flag"}).status, kExitUsage);
}

TEST_F(Cli, HelpDocumentsEveryFlag) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.status, kExitOk);
  for (const char* flag : {"--config", "--seed", "--out-dir", "--schedule", "--baseline", "--xi",
                           "--alpha", "--beta", "--help"}) {
    EXPECT_THAT(r.out, HasSubstr(flag));
  }
  for (const char* verb : {"gen-data", "train-teacher", "encode", "train-student",
                           "train-baseline", "evaluate", "report", "run-all"}) {
    EXPECT_THAT(r.out, HasSubstr(verb));
  }
  EXPECT_EQ(run({"evaluate", "--help"}).status, kExitOk);
}

TEST_F(Cli, EncodeWithoutTeacherIsIoError) {
  ASSERT_EQ(run({"gen-data", "--config", cfg(), "--out-dir", out("w")}).status, kExitOk);
  const Result r = run({"encode", "--config", cfg(), "--out-dir", out("w")});
  EXPECT_EQ(r.status, kExitIo);
  expect_one_error_line(r, "io");
  EXPECT_THAT(r.err, HasSubstr("missing teacher checkpoint"));
  EXPECT_FALSE(fs::exists(dir / "w" / "annotations.jsonl"));

  EXPECT_EQ(run({"train-baseline", "--baseline", "poe", "--config", cfg(), "--out-dir", out("w")}).status,
            kExitIo);
}

TEST_F(Cli, InvalidConfigTouchesNothing) {
  const Result r = run({"run-all", "--config", cfg(), "--alpha", "1.1", "--out-dir", out("bad")});
  EXPECT_EQ(r.status, kExitConfig);
  expect_one_error_line(r, "config");
  EXPECT_FALSE(fs::exists(dir / "bad"));

  write_file_atomic(dir / "typo.cfg", "xii = 0.9\n");
  EXPECT_EQ(run({"gen-data", "--config", out("typo.cfg"), "--out-dir", out("bad")}).status, kExitConfig);
  EXPECT_EQ(run({"gen-data", "--schedule", "X9", "--out-dir", out("bad")}).status, kExitConfig);
  EXPECT_EQ(run({"train-baseline", "--baseline", "masks", "--out-dir", out("bad")}).status, kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "bad"));
  EXPECT_EQ(run({"gen-data", "--config", out("absent.cfg"), "--out-dir", out("bad")}).status, kExitIo);
}

TEST_F(Cli, DivergenceExitStatus) {
  write_file_atomic(dir / "wild.cfg",
                    "optimizer = sgd\nlearning_rate = 1e308\nteacher_epochs = 3\n"
                    "data_n_train = 200\ndata_n_id = 50\ndata_n_ood = 50\n");
  ASSERT_EQ(run({"gen-data", "--config", out("wild.cfg"), "--out-dir", out("d")}).status, kExitOk);
  const Result r = run({"train-teacher", "--config", out("wild.cfg"), "--out-dir", out("d")});
  EXPECT_EQ(r.status, kExitDivergence) << r.err;
  expect_one_error_line(r, "divergence");
  EXPECT_FALSE(fs::exists(dir / "d" / "teacher.ckpt"));
}

TEST_F(Cli, StudentScheduleFlag) {
  const std::string w = out("s");
  ASSERT_EQ(run({"gen-data", "--config", cfg(), "--out-dir", w}).status, kExitOk);
  ASSERT_EQ(run({"train-teacher", "--config", cfg(), "--out-dir", w}).status, kExitOk);
  ASSERT_EQ(run({"encode", "--config", cfg(), "--out-dir", w}).status, kExitOk);
  auto kinds = [&] {
    std::istringstream log(read_file(dir / "s" / files::kStudentLog));
    std::string line, out;
    std::getline(log, line);
    while (std::getline(log, line)) {
      std::vector<std::string> cells;
      std::istringstream row(line);
      for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
      out += cells.at(3) + " ";
    }
    return out;
  };
  ASSERT_EQ(run({"train-student", "--config", cfg(), "--schedule", "F2", "--out-dir", w}).status, kExitOk);
  EXPECT_EQ(kinds(), "HL HL SL ");
  ASSERT_EQ(run({"train-student", "--config", cfg(), "--schedule", "L2", "--out-dir", w}).status, kExitOk);
  EXPECT_EQ(kinds(), "SL HL HL ");
  ASSERT_EQ(run({"train-student", "--config", cfg(), "--schedule", "none", "--out-dir", w}).status, kExitOk);
  EXPECT_EQ(kinds(), "SL SL SL ");
}

TEST_F(Cli, RunAllIsByteIdenticalAndManifestReplays) {
  ASSERT_EQ(run({"run-all", "--config", cfg(), "--out-dir", out("a")}).status, kExitOk);
  ASSERT_EQ(run({"run-all", "--config", cfg(), "--out-dir", out("b")}).status, kExitOk);
  for (const char* name : {"report", "metrics.csv", "histogram.csv", "student.ckpt",
                           "teacher.ckpt", "annotations.jsonl", "manifest-run-all.json"}) {
    EXPECT_EQ(read_file(dir / "a" / name), read_file(dir / "b" / name)) << name;
  }

  const auto manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest-run-all.json"));
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["config_sha256"].get<std::string>().size(), 64u);
  EXPECT_TRUE(manifest["outputs"].contains("report"));
  const auto teacher_manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest-train-teacher.json"));
  EXPECT_TRUE(teacher_manifest["inputs"].contains("train.jsonl"));
  EXPECT_EQ(teacher_manifest["inputs"]["train.jsonl"], manifest["outputs"]["train.jsonl"]);

  ASSERT_EQ(run({"run-all", "--config", out("a/manifest-run-all.json"), "--out-dir", out("c")}).status,
            kExitOk);
  EXPECT_EQ(read_file(dir / "a" / "report"), read_file(dir / "c" / "report"));

  ASSERT_EQ(run({"run-all", "--config", cfg(), "--seed", "7", "--out-dir", out("d")}).status, kExitOk);
  EXPECT_NE(read_file(dir / "a" / "report"), read_file(dir / "d" / "report"));
  for (const auto& entry : fs::recursive_directory_iterator(dir.path())) {
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
  }
}

TEST_F(Cli, BaselinesJoinTheReport) {
  const std::string w = out("r");
  ASSERT_EQ(run({"run-all", "--config", cfg(), "--out-dir", w}).status, kExitOk);
  for (const char* kind : {"none", "reweighting", "poe"}) {
    ASSERT_EQ(run({"train-baseline", "--baseline", kind, "--config", cfg(), "--out-dir", w}).status, kExitOk);
  }
  ASSERT_EQ(run({"evaluate", "--config", cfg(), "--out-dir", w}).status, kExitOk);
  const Result r = run({"report", "--config", cfg(), "--out-dir", w});
  ASSERT_EQ(r.status, kExitOk);
  for (const char* method : {"teacher", "softle", "standard", "reweighting", "poe"}) {
    EXPECT_THAT(r.out, HasSubstr(method));
  }
  const std::string metrics = read_file(dir / "r" / "metrics.csv");
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 6);
}

}  // namespace
}  // namespace softle::cli
