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

#include "softle/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "softle/error.hpp"

namespace softle {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) fail(ErrorCategory::kFormat, "cannot format double");
  // JSON readers take "-0" as the integer zero and drop the sign.
  if (value == 0.0 && std::signbit(value)) return "-0.0";
  return std::string(buf.data(), end);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCategory::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCategory::kIo, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCategory::kIo, "cannot rename into '" + path.string() + "'");
  }
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  fail(ErrorCategory::kFormat, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Dataset parse_dataset(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t line_no = 0;
  while (line_no < lines.size() && is_blank(lines[line_no])) ++line_no;
  if (line_no == lines.size()) fail(ErrorCategory::kFormat, "empty dataset");

  int num_classes = 0;
  int num_features = 0;
  SplitTag tag = SplitTag::kTrain;
  try {
    const json header = json::parse(lines[line_no]);
    num_classes = header.at("K").get<int>();
    num_features = header.at("F").get<int>();
    tag = parse_split_tag(header.at("split_tag").get<std::string>());
  } catch (const json::exception& e) {
    bad_line(line_no + 1, std::string("malformed header: ") + e.what());
  } catch (const Error& e) {
    bad_line(line_no + 1, e.what());
  }
  if (num_classes <= 0 || num_features <= 0) bad_line(line_no + 1, "K and F must be positive");

  std::vector<Sample> samples;
  std::map<std::int64_t, std::size_t> seen;
  for (++line_no; line_no < lines.size(); ++line_no) {
    if (is_blank(lines[line_no])) continue;
    const std::size_t human = line_no + 1;
    Sample sample;
    try {
      const json rec = json::parse(lines[line_no]);
      sample.id = rec.at("id").get<std::int64_t>();
      sample.gold_class = rec.at("gold").get<int>();
      const auto values = rec.at("features").get<std::vector<double>>();
      sample.features = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    } catch (const json::exception& e) {
      bad_line(human, std::string("malformed record: ") + e.what());
    }
    if (sample.features.size() != num_features) {
      bad_line(human, "expected " + std::to_string(num_features) + " features, got " +
                          std::to_string(sample.features.size()));
    }
    if (!sample.features.allFinite()) bad_line(human, "non-finite feature");
    if (sample.gold_class < 0 || sample.gold_class >= num_classes) {
      bad_line(human, "gold class " + std::to_string(sample.gold_class) + " outside [0, " +
                          std::to_string(num_classes) + ")");
    }
    if (sample.id < 0) bad_line(human, "negative id");
    if (auto [it, inserted] = seen.emplace(sample.id, human); !inserted) {
      bad_line(human, "duplicate id " + std::to_string(sample.id) + " (first on line " +
                          std::to_string(it->second) + ")");
    }
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) fail(ErrorCategory::kFormat, "empty dataset");
  return Dataset(std::move(samples), num_classes, num_features, tag);
}

std::string format_dataset(const Dataset& dataset) {
  if (dataset.empty()) fail(ErrorCategory::kFormat, "refusing to write an empty dataset");
  std::string out;
  out += "{\"K\":" + std::to_string(dataset.num_classes()) +
         ",\"F\":" + std::to_string(dataset.num_features()) + ",\"split_tag\":\"" +
         std::string(to_string(dataset.split_tag())) + "\"}\n";
  for (const Sample& s : dataset.samples()) {
    if (!s.features.allFinite()) {
      fail(ErrorCategory::kFormat, "non-finite feature in sample " + std::to_string(s.id));
    }
    out += "{\"id\":" + std::to_string(s.id) + ",\"gold\":" + std::to_string(s.gold_class) +
           ",\"features\":[";
    for (Eigen::Index j = 0; j < s.features.size(); ++j) {
      if (j) out += ',';
      out += format_double(s.features[j]);
    }
    out += "]}\n";
  }
  return out;
}

Dataset load_dataset(const fs::path& path) { return parse_dataset(read_file(path)); }

void save_dataset(const Dataset& dataset, const fs::path& path) {
  write_file_atomic(path, format_dataset(dataset));
}

ScheduleMode parse_schedule_mode(std::string_view text) {
  if (text == "F") return ScheduleMode::kFirst;
  if (text == "L") return ScheduleMode::kLast;
  if (text == "none") return ScheduleMode::kNone;
  fail(ErrorCategory::kConfig, "unknown schedule_mode '" + std::string(text) + "'");
}

Arch parse_arch(std::string_view text) {
  if (text == "linear") return Arch::kLinear;
  if (text == "mlp") return Arch::kMlp;
  fail(ErrorCategory::kConfig, "unknown arch '" + std::string(text) + "'");
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "sgd") return OptimizerKind::kSgd;
  if (text == "adam") return OptimizerKind::kAdam;
  fail(ErrorCategory::kConfig, "unknown optimizer '" + std::string(text) + "'");
}

OodMode parse_ood_mode(std::string_view text) {
  if (text == "decorrelated") return OodMode::kDecorrelated;
  if (text == "inverted") return OodMode::kInverted;
  fail(ErrorCategory::kConfig, "unknown ood_mode '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCategory::kConfig,
         "key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  using Setter = void (*)(ExperimentConfig&, std::string_view, std::string_view);
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"xi", [](ExperimentConfig& c, auto k, auto v) { c.run.xi = parse_number<double>(k, v); }},
      {"alpha", [](ExperimentConfig& c, auto k, auto v) { c.run.alpha = parse_number<double>(k, v); }},
      {"beta", [](ExperimentConfig& c, auto k, auto v) { c.run.beta = parse_number<double>(k, v); }},
      {"teacher_epochs", [](ExperimentConfig& c, auto k, auto v) { c.run.teacher_epochs = parse_number<int>(k, v); }},
      {"student_epochs", [](ExperimentConfig& c, auto k, auto v) { c.run.student_epochs = parse_number<int>(k, v); }},
      {"warmup_epochs", [](ExperimentConfig& c, auto k, auto v) { c.run.warmup_epochs = parse_number<int>(k, v); }},
      {"schedule_mode", [](ExperimentConfig& c, auto, auto v) { c.run.schedule_mode = parse_schedule_mode(v); }},
      {"learning_rate", [](ExperimentConfig& c, auto k, auto v) { c.run.learning_rate = parse_number<double>(k, v); }},
      {"seed", [](ExperimentConfig& c, auto k, auto v) { c.run.seed = parse_number<std::uint64_t>(k, v); }},
      {"optimizer", [](ExperimentConfig& c, auto, auto v) { c.run.optimizer = parse_optimizer(v); }},
      {"arch", [](ExperimentConfig& c, auto, auto v) { c.run.arch = parse_arch(v); }},
      {"hidden_size", [](ExperimentConfig& c, auto k, auto v) { c.run.hidden_size = parse_number<int>(k, v); }},
      {"batch_size", [](ExperimentConfig& c, auto k, auto v) { c.run.batch_size = parse_number<int>(k, v); }},
      {"data_num_classes", [](ExperimentConfig& c, auto k, auto v) { c.data.num_classes = parse_number<int>(k, v); }},
      {"data_signal_features", [](ExperimentConfig& c, auto k, auto v) { c.data.signal_features = parse_number<int>(k, v); }},
      {"data_shortcut_features", [](ExperimentConfig& c, auto k, auto v) { c.data.shortcut_features = parse_number<int>(k, v); }},
      {"data_rho", [](ExperimentConfig& c, auto k, auto v) { c.data.rho = parse_number<double>(k, v); }},
      {"data_signal_strength", [](ExperimentConfig& c, auto k, auto v) { c.data.signal_strength = parse_number<double>(k, v); }},
      {"data_noise_sigma", [](ExperimentConfig& c, auto k, auto v) { c.data.noise_sigma = parse_number<double>(k, v); }},
      {"data_n_train", [](ExperimentConfig& c, auto k, auto v) { c.data.n_train = parse_number<int>(k, v); }},
      {"data_n_id", [](ExperimentConfig& c, auto k, auto v) { c.data.n_id = parse_number<int>(k, v); }},
      {"data_n_ood", [](ExperimentConfig& c, auto k, auto v) { c.data.n_ood = parse_number<int>(k, v); }},
      {"data_ood_mode", [](ExperimentConfig& c, auto, auto v) { c.data.ood_mode = parse_ood_mode(v); }},
  };

  std::map<std::string, std::size_t, std::less<>> seen;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(i + 1) + ": ";
    if (eq == std::string_view::npos) fail(ErrorCategory::kConfig, where + "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorCategory::kConfig, where + "unknown key '" + std::string(key) + "'");
    if (!seen.emplace(std::string(key), i + 1).second) {
      fail(ErrorCategory::kConfig, where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      it->second(cfg, key, value);
    } catch (const Error& e) {
      fail(ErrorCategory::kConfig, where + e.what());
    }
  }
  return cfg;
}

std::string format_config(const ExperimentConfig& config) {
  const RunConfig& r = config.run;
  const BiasedDatasetSpec& d = config.data;
  std::ostringstream out;
  out << "xi = " << format_double(r.xi) << '\n'
      << "alpha = " << format_double(r.alpha) << '\n'
      << "beta = " << format_double(r.beta) << '\n'
      << "teacher_epochs = " << r.teacher_epochs << '\n'
      << "student_epochs = " << r.student_epochs << '\n'
      << "warmup_epochs = " << r.warmup_epochs << '\n'
      << "schedule_mode = " << to_string(r.schedule_mode) << '\n'
      << "learning_rate = " << format_double(r.learning_rate) << '\n'
      << "seed = " << r.seed << '\n'
      << "optimizer = " << to_string(r.optimizer) << '\n'
      << "arch = " << to_string(r.arch) << '\n'
      << "hidden_size = " << r.hidden_size << '\n'
      << "batch_size = " << r.batch_size << '\n'
      << "data_num_classes = " << d.num_classes << '\n'
      << "data_signal_features = " << d.signal_features << '\n'
      << "data_shortcut_features = " << d.shortcut_features << '\n'
      << "data_rho = " << format_double(d.rho) << '\n'
      << "data_signal_strength = " << format_double(d.signal_strength) << '\n'
      << "data_noise_sigma = " << format_double(d.noise_sigma) << '\n'
      << "data_n_train = " << d.n_train << '\n'
      << "data_n_id = " << d.n_id << '\n'
      << "data_n_ood = " << d.n_ood << '\n'
      << "data_ood_mode = " << to_string(d.ood_mode) << '\n';
  return out.str();
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

}  // namespace softle
