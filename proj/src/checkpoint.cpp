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

#include "softle/checkpoint.hpp"

#include "softle/error.hpp"
#include "softle/io.hpp"

namespace softle {

namespace {

constexpr std::string_view kFormatTag = "softle-checkpoint-v1";

}  // namespace

ordered_json run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["xi"] = c.xi;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["teacher_epochs"] = c.teacher_epochs;
  j["student_epochs"] = c.student_epochs;
  j["warmup_epochs"] = c.warmup_epochs;
  j["schedule_mode"] = std::string(to_string(c.schedule_mode));
  j["learning_rate"] = c.learning_rate;
  j["seed"] = c.seed;
  j["optimizer"] = std::string(to_string(c.optimizer));
  j["arch"] = std::string(to_string(c.arch));
  j["hidden_size"] = c.hidden_size;
  j["batch_size"] = c.batch_size;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.xi = j.at("xi").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.teacher_epochs = j.at("teacher_epochs").get<int>();
  c.student_epochs = j.at("student_epochs").get<int>();
  c.warmup_epochs = j.at("warmup_epochs").get<int>();
  c.schedule_mode = parse_schedule_mode(j.at("schedule_mode").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  c.arch = parse_arch(j.at("arch").get<std::string>());
  c.hidden_size = j.at("hidden_size").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  return c;
}

ordered_json dataset_spec_to_json(const BiasedDatasetSpec& s) {
  ordered_json j;
  j["num_classes"] = s.num_classes;
  j["signal_features"] = s.signal_features;
  j["shortcut_features"] = s.shortcut_features;
  j["rho"] = s.rho;
  j["signal_strength"] = s.signal_strength;
  j["noise_sigma"] = s.noise_sigma;
  j["n_train"] = s.n_train;
  j["n_id"] = s.n_id;
  j["n_ood"] = s.n_ood;
  j["ood_mode"] = std::string(to_string(s.ood_mode));
  return j;
}

std::string format_checkpoint(const ClassifierParams& params, const RunConfig& config) {
  params.validate();
  ordered_json j;
  j["format"] = std::string(kFormatTag);
  j["arch"] = std::string(to_string(params.arch));
  j["shape"] = {params.num_outputs(), params.num_inputs()};
  j["hidden_size"] = params.hidden_size();
  ordered_json layers = ordered_json::array();
  for (const Layer& l : params.layers) {
    ordered_json lj;
    lj["rows"] = l.weights.rows();
    lj["cols"] = l.weights.cols();
    // Matrix is row-major, so data() is already in file order.
    lj["weights"] = std::vector<double>(l.weights.data(), l.weights.data() + l.weights.size());
    lj["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  j["config"] = run_config_to_json(config);
  return j.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  Checkpoint ck;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kFormatTag) {
      fail(ErrorCategory::kFormat, "unsupported format tag");
    }
    ck.params.arch = parse_arch(j.at("arch").get<std::string>());
    for (const auto& lj : j.at("layers")) {
      const auto rows = lj.at("rows").get<Eigen::Index>();
      const auto cols = lj.at("cols").get<Eigen::Index>();
      const auto w = lj.at("weights").get<std::vector<double>>();
      const auto b = lj.at("bias").get<std::vector<double>>();
      if (rows <= 0 || cols <= 0 || static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows) {
        fail(ErrorCategory::kFormat, "layer data does not match declared shape");
      }
      Layer layer;
      layer.weights = Eigen::Map<const Matrix>(w.data(), rows, cols);
      layer.bias = Eigen::Map<const Vector>(b.data(), rows);
      ck.params.layers.push_back(std::move(layer));
    }
    if (ck.params.layers.empty()) fail(ErrorCategory::kFormat, "no layers");
    const auto shape = j.at("shape").get<std::vector<int>>();
    if (shape.size() != 2 || shape[0] != ck.params.num_outputs() ||
        shape[1] != ck.params.num_inputs()) {
      fail(ErrorCategory::kFormat, "declared shape does not match layers");
    }
    ck.config = run_config_from_json(j.at("config"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kFormat, std::string("checkpoint: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorCategory::kFormat, std::string("checkpoint: ") + e.what());
  }
  ck.params.validate();
  return ck;
}

void save_checkpoint(const ClassifierParams& params, const RunConfig& config,
                     const std::filesystem::path& path) {
  write_file_atomic(path, format_checkpoint(params, config));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace softle
