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

#include <filesystem>
#include <string>
#include <string_view>

#include "softle/types.hpp"

namespace softle {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Dataset files are line-delimited JSON. The first line is a header
//   {"K":3,"F":23,"split_tag":"train"}
// and every following line one sample
//   {"id":0,"gold":1,"features":[0.25,-1.5,...]}
// Doubles are written in shortest round-trip form, so save/load is bit-exact.

Dataset parse_dataset(std::string_view text);
std::string format_dataset(const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Everything a run needs: training hyperparameters plus the generative
/// parameters of the synthetic benchmark.
struct ExperimentConfig {
  RunConfig run;
  BiasedDatasetSpec data;

  void validate() const {
    run.validate();
    data.validate();
  }
};

// Config files are flat `key = value` lines; '#' starts a comment. Run keys
// use the RunConfig field names, data keys carry a `data_` prefix. Unknown or
// repeated keys are rejected.

ExperimentConfig parse_config(std::string_view text);
std::string format_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

ScheduleMode parse_schedule_mode(std::string_view text);
Arch parse_arch(std::string_view text);
OptimizerKind parse_optimizer(std::string_view text);
OodMode parse_ood_mode(std::string_view text);

}  // namespace softle
