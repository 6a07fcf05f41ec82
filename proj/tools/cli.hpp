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

#include <ostream>
#include <string>
#include <vector>

namespace softle::cli {

// Exit statuses of `softle <verb>`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitDivergence = 5;

/// Runs one command line (without the program name). Progress goes to `out`;
/// failures print a single `error: <category>: <detail>` line to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// File names inside a workspace directory, beyond the pipeline artifacts.
namespace files {
inline constexpr const char* kTrain = "train.jsonl";
inline constexpr const char* kIdTest = "id_test.jsonl";
inline constexpr const char* kOodTest = "ood_test.jsonl";
inline constexpr const char* kConfig = "config.txt";
inline constexpr const char* kTeacherLog = "teacher_log.csv";
inline constexpr const char* kStudentLog = "student_log.csv";
}  // namespace files

}  // namespace softle::cli
