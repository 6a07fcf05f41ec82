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

#include <json.hpp>

#include "softle/model.hpp"
#include "softle/types.hpp"

namespace softle {

using ordered_json = nlohmann::ordered_json;

/// A classifier together with the configuration that produced it.
struct Checkpoint {
  ClassifierParams params;
  RunConfig config;
};

// Checkpoint files are a single JSON document:
//   {"format":"softle-checkpoint-v1","arch":"linear","shape":[K_out,F],
//    "hidden_size":0,"layers":[{"rows":R,"cols":C,"weights":[...row-major...],
//    "bias":[...]}, ...],"config":{...RunConfig fields...}}

std::string format_checkpoint(const ClassifierParams& params, const RunConfig& config);
Checkpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const ClassifierParams& params, const RunConfig& config,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

ordered_json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
ordered_json dataset_spec_to_json(const BiasedDatasetSpec& spec);

}  // namespace softle
