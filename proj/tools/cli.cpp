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

#include "cli.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "softle/baselines.hpp"
#include "softle/checkpoint.hpp"
#include "softle/datagen.hpp"
#include "softle/error.hpp"
#include "softle/io.hpp"
#include "softle/pipeline.hpp"

namespace softle::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "softle 1.0.0";

const std::array<const char*, 8> kVerbs = {"gen-data", "train-student", "train-teacher", "encode",
                                           "train-baseline", "evaluate", "report", "run-all"};

struct Options {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::string out_dir = "softle-out";
  std::string data_dir;
  std::optional<std::string> schedule;
  std::string baseline = "none";
  std::optional<double> xi;
  std::optional<double> alpha;
  std::optional<double> beta;
};

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCategory::kIo, "sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

// Everything one verb needs, plus the files it touched for the manifest.
struct Context {
  std::string verb;
  ExperimentConfig cfg;
  fs::path out_dir;
  fs::path data_dir;
  BaselineKind baseline = BaselineKind::kNone;
  std::ostream* out = nullptr;
  std::map<std::string, std::string> inputs;   // name -> sha256
  std::map<std::string, std::string> outputs;  // name -> sha256

  fs::path data(const char* name) const { return data_dir / name; }
  fs::path work(const std::string& name) const { return out_dir / name; }

  std::string read(const fs::path& path) {
    std::string text = read_file(path);
    inputs[path.filename().string()] = sha256_hex(text);
    return text;
  }
  void write(const fs::path& path, const std::string& text) {
    write_file_atomic(path, text);
    outputs[path.filename().string()] = sha256_hex(text);
    *out << "wrote " << path.string() << '\n';
  }
};

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) fail(ErrorCategory::kIo, "missing " + what + " '" + path.string() + "'");
}

Dataset read_dataset(Context& ctx, const char* name) {
  const fs::path path = ctx.data(name);
  require_file(path, "dataset");
  try {
    return parse_dataset(ctx.read(path));
  } catch (const Error& e) {
    fail(e.category(), path.filename().string() + ": " + e.what());
  }
}

std::optional<Dataset> read_optional_dataset(Context& ctx, const char* name) {
  if (!fs::exists(ctx.data(name))) return std::nullopt;
  return read_dataset(ctx, name);
}

Checkpoint read_checkpoint(Context& ctx, const std::string& name, const std::string& what) {
  const fs::path path = ctx.work(name);
  require_file(path, what);
  try {
    return parse_checkpoint(ctx.read(path));
  } catch (const Error& e) {
    fail(e.category(), name + ": " + e.what());
  }
}

std::string baseline_method(BaselineKind kind) {
  return kind == BaselineKind::kNone ? "standard" : std::string(to_string(kind));
}

std::string baseline_checkpoint(BaselineKind kind) {
  return "baseline_" + std::string(to_string(kind)) + ".ckpt";
}

void gen_data(Context& ctx) {
  const GeneratedSplits splits = generate(ctx.cfg.data, ctx.cfg.run.seed);
  std::error_code ec;
  fs::create_directories(ctx.data_dir, ec);
  if (ec) fail(ErrorCategory::kIo, "cannot create '" + ctx.data_dir.string() + "'");
  ctx.write(ctx.data(files::kTrain), format_dataset(splits.train));
  ctx.write(ctx.data(files::kIdTest), format_dataset(splits.id_test));
  ctx.write(ctx.data(files::kOodTest), format_dataset(splits.ood_test));
}

void train_teacher_verb(Context& ctx) {
  const Dataset train = read_dataset(ctx, files::kTrain);
  const auto id = read_optional_dataset(ctx, files::kIdTest);
  const auto ood = read_optional_dataset(ctx, files::kOodTest);
  const TrainedModel t = train_teacher(train, ctx.cfg.run, {id ? &*id : nullptr, ood ? &*ood : nullptr});
  ctx.write(ctx.work(artifacts::kTeacherCheckpoint), format_checkpoint(t.params, ctx.cfg.run));
  ctx.write(ctx.work(files::kTeacherLog), format_training_logs({t.log}));
}

void encode_verb(Context& ctx) {
  const Checkpoint teacher =
      read_checkpoint(ctx, artifacts::kTeacherCheckpoint, "teacher checkpoint");
  const Dataset train = read_dataset(ctx, files::kTrain);
  const auto encoded = encode_labels(train, teacher.params, ctx.cfg.run);
  ctx.write(ctx.work(artifacts::kAnnotations), format_annotations(annotations_of(encoded)));
}

void train_student_verb(Context& ctx) {
  const Dataset train = read_dataset(ctx, files::kTrain);
  const fs::path ann_path = ctx.work(artifacts::kAnnotations);
  require_file(ann_path, "annotations");
  const auto annotations = parse_annotations(ctx.read(ann_path));
  const std::vector<LabelVector> labels = labels_from_annotations(train, annotations, ctx.cfg.run);
  const auto id = read_optional_dataset(ctx, files::kIdTest);
  const auto ood = read_optional_dataset(ctx, files::kOodTest);
  const TrainedModel s =
      train_student(train, labels, ctx.cfg.run, {id ? &*id : nullptr, ood ? &*ood : nullptr});
  ctx.write(ctx.work(artifacts::kStudentCheckpoint), format_checkpoint(s.params, ctx.cfg.run));
  ctx.write(ctx.work(files::kStudentLog), format_training_logs({s.log}));
}

void train_baseline_verb(Context& ctx) {
  std::optional<Checkpoint> teacher;
  if (ctx.baseline != BaselineKind::kNone) {
    teacher = read_checkpoint(ctx, artifacts::kTeacherCheckpoint, "teacher checkpoint");
  }
  const Dataset train = read_dataset(ctx, files::kTrain);
  const auto id = read_optional_dataset(ctx, files::kIdTest);
  const auto ood = read_optional_dataset(ctx, files::kOodTest);
  const TrainedModel b = train_baseline(ctx.baseline, train, teacher ? &teacher->params : nullptr,
                                        ctx.cfg.run, {id ? &*id : nullptr, ood ? &*ood : nullptr});
  const std::string kind(to_string(ctx.baseline));
  ctx.write(ctx.work(baseline_checkpoint(ctx.baseline)), format_checkpoint(b.params, ctx.cfg.run));
  ctx.write(ctx.work("baseline_" + kind + "_log.csv"), format_training_logs({b.log}));
}

void evaluate_verb(Context& ctx) {
  const Dataset id = read_dataset(ctx, files::kIdTest);
  const Dataset ood = read_dataset(ctx, files::kOodTest);
  const bool synthetic_layout = id.num_features() == ctx.cfg.data.num_features() &&
                                id.num_classes() == ctx.cfg.data.num_classes;
  const BiasedDatasetSpec* spec = synthetic_layout ? &ctx.cfg.data : nullptr;

  std::vector<std::pair<std::string, std::string>> models = {
      {"teacher", artifacts::kTeacherCheckpoint}, {"softle", artifacts::kStudentCheckpoint}};
  for (BaselineKind k : {BaselineKind::kNone, BaselineKind::kReweighting, BaselineKind::kPoe}) {
    models.emplace_back(baseline_method(k), baseline_checkpoint(k));
  }
  std::vector<EvalReport> reports;
  for (const auto& [method, file] : models) {
    if (!fs::exists(ctx.work(file))) continue;
    const Checkpoint ck = read_checkpoint(ctx, file, "checkpoint");
    reports.push_back(evaluate(ck.params, method, id, ood, ctx.cfg.run, spec));
  }
  if (reports.empty()) {
    fail(ErrorCategory::kIo, "no checkpoints to evaluate in '" + ctx.out_dir.string() + "'");
  }
  ctx.write(ctx.work(artifacts::kReport), format_report(reports));
}

void report_verb(Context& ctx) {
  const fs::path path = ctx.work(artifacts::kReport);
  require_file(path, "report");
  const std::vector<EvalReport> reports = parse_report(ctx.read(path));
  ctx.write(ctx.work(artifacts::kMetrics), metrics_csv(reports));
  ctx.write(ctx.work(artifacts::kHistogram), histogram_csv(reports));
  std::ostream& out = *ctx.out;
  out << "method        id_acc  ood_acc  avg_acc\n";
  for (const auto& r : reports) {
    char line[96];
    std::snprintf(line, sizeof line, "%-12s  %.4f  %.4f   %.4f\n", r.method.c_str(), r.id.accuracy,
                  r.ood.accuracy, r.avg_accuracy);
    out << line;
  }
}

void write_manifest(Context& ctx, const std::string& name) {
  const std::string config_text = format_config(ctx.cfg);
  nlohmann::ordered_json m;
  m["format"] = "softle-manifest-v1";
  m["tool"] = kVersion;
  m["verb"] = ctx.verb;
  m["seed"] = ctx.cfg.run.seed;
  m["config_sha256"] = sha256_hex(config_text);
  m["config"] = config_text;
  if (ctx.verb == "train-baseline") m["baseline"] = std::string(to_string(ctx.baseline));
  m["inputs"] = ctx.inputs;
  m["outputs"] = ctx.outputs;
  m["artifact_versions"] = {{"checkpoint", "softle-checkpoint-v1"},
                            {"report", "softle-report-v1"},
                            {"dataset", "jsonl-v1"},
                            {"annotations", "jsonl-v1"},
                            {"training_log", "csv-v1"}};
  write_file_atomic(ctx.work(name), m.dump(2) + "\n");
}

using VerbFn = void (*)(Context&);

VerbFn verb_function(const std::string& verb) {
  if (verb == "gen-data") return gen_data;
  if (verb == "train-teacher") return train_teacher_verb;
  if (verb == "encode") return encode_verb;
  if (verb == "train-student") return train_student_verb;
  if (verb == "train-baseline") return train_baseline_verb;
  if (verb == "evaluate") return evaluate_verb;
  if (verb == "report") return report_verb;
  return nullptr;
}

// A manifest written by an earlier run is accepted wherever a config file is.
ExperimentConfig load_config_arg(const std::string& arg) {
  if (arg == "default") return ExperimentConfig{};
  const std::string text = read_file(arg);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCategory::kConfig, "manifest '" + arg + "': " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_string()) {
      fail(ErrorCategory::kConfig, "manifest '" + arg + "' has no config");
    }
    return parse_config(j["config"].get<std::string>());
  }
  return parse_config(text);
}

void apply_schedule(RunConfig& run, const std::string& text) {
  if (text == "none") {
    run.schedule_mode = ScheduleMode::kNone;
    return;
  }
  static const std::regex pattern("([FL])([0-9]+)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern) || m[2].length() > 6) {
    fail(ErrorCategory::kConfig, "schedule must be F<n>, L<n> or none, got '" + text + "'");
  }
  run.schedule_mode = parse_schedule_mode(m[1].str());
  run.warmup_epochs = std::stoi(m[2].str());
}

ExperimentConfig resolve_config(const Options& o) {
  ExperimentConfig cfg = load_config_arg(o.config);
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.xi) cfg.run.xi = *o.xi;
  if (o.alpha) cfg.run.alpha = *o.alpha;
  if (o.beta) cfg.run.beta = *o.beta;
  if (o.schedule) apply_schedule(cfg.run, *o.schedule);
  cfg.validate();
  return cfg;
}

int exit_status(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage: return kExitUsage;
    case ErrorCategory::kConfig: return kExitConfig;
    case ErrorCategory::kDivergence: return kExitDivergence;
    case ErrorCategory::kIo:
    case ErrorCategory::kFormat:
    case ErrorCategory::kShape: return kExitIo;
  }
  return kExitIo;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

void add_common_options(CLI::App& app, Options& o) {
  app.add_option("--config", o.config,
                 "Config file (key = value lines), a manifest from an earlier run, or 'default'")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Override the config's seed (data generation and training)");
  app.add_option("--out-dir", o.out_dir, "Workspace for checkpoints, logs, reports and manifests")
      ->capture_default_str();
  app.add_option("--data-dir", o.data_dir, "Directory holding the dataset files (default: --out-dir)");
  app.add_option("--schedule", o.schedule,
                 "Student loss schedule: F<n> (hard labels for the first n epochs), L<n> (last n) or none");
  app.add_option("--baseline", o.baseline, "train-baseline objective: none, reweighting or poe")
      ->capture_default_str();
  app.add_option("--xi", o.xi, "Override the over-confidence threshold");
  app.add_option("--alpha", o.alpha, "Override the shortcut-degree log base");
  app.add_option("--beta", o.beta, "Override the shortcut-degree offset");
}

std::string help_text() {
  return std::string(kVersion) +
         "\n"
         "usage: softle <verb> [options]\n"
         "\n"
         "verbs:\n"
         "  gen-data        write train/id_test/ood_test .jsonl from the config's data_* keys\n"
         "  train-teacher   train the hard-label teacher -> teacher.ckpt\n"
         "  encode          teacher confidences -> annotations.jsonl (soft-label encoding)\n"
         "  train-student   train the (K+1)-class student -> student.ckpt\n"
         "  train-baseline  train a comparison model (--baseline) -> baseline_<kind>.ckpt\n"
         "  evaluate        score every checkpoint in --out-dir on ID and OOD -> report\n"
         "  report          render report into metrics.csv and histogram.csv\n"
         "  run-all         gen-data, train-teacher, encode, train-student, evaluate, report\n"
         "\n"
         "options (accepted by every verb):\n"
         "  --config PATH|default   config file, earlier manifest, or built-in defaults\n"
         "  --seed N                override the seed\n"
         "  --out-dir DIR           workspace directory (default softle-out)\n"
         "  --data-dir DIR          dataset directory (default: --out-dir)\n"
         "  --schedule F2|L2|none   student loss schedule, any F<n>/L<n>\n"
         "  --baseline KIND         none, reweighting or poe (train-baseline)\n"
         "  --xi X --alpha A --beta B   numeric overrides of the label encoding\n"
         "  --help                  show this text\n"
         "\n"
         "exit status: 0 ok, 2 usage, 3 invalid config, 4 IO or file format, 5 divergence\n"
         "errors print one line: error: <category>: <detail>\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto report_error = [&](std::string_view category, const std::string& detail, int status) {
    err << "error: " << category << ": " << one_line(detail) << '\n';
    return status;
  };

  if (args.empty()) return report_error("usage", "no verb given; try --help", kExitUsage);
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << help_text();
    return kExitOk;
  }
  const std::string verb = args[0];
  if (std::find(kVerbs.begin(), kVerbs.end(), verb) == kVerbs.end()) {
    return report_error("usage", "unknown verb '" + verb + "'", kExitUsage);
  }

  Options o;
  CLI::App app(std::string("softle ") + verb, "softle " + verb);
  add_common_options(app, o);
  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << help_text();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitUsage);
  }

  try {
    Context ctx;
    ctx.verb = verb;
    ctx.cfg = resolve_config(o);
    ctx.out_dir = o.out_dir;
    ctx.data_dir = o.data_dir.empty() ? ctx.out_dir : fs::path(o.data_dir);
    ctx.out = &out;
    if (verb == "train-baseline") ctx.baseline = parse_baseline_kind(o.baseline);

    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) fail(ErrorCategory::kIo, "cannot create '" + ctx.out_dir.string() + "'");

    if (verb == "run-all") {
      for (const char* step :
           {"gen-data", "train-teacher", "encode", "train-student", "evaluate", "report"}) {
        Context stage = ctx;
        stage.verb = step;
        stage.inputs.clear();
        stage.outputs.clear();
        try {
          verb_function(step)(stage);
        } catch (const Error& e) {
          fail(e.category(), std::string(step) + ": " + e.what());
        }
        write_manifest(stage, std::string("manifest-") + step + ".json");
        for (const auto& [k, v] : stage.outputs) ctx.outputs[k] = v;
      }
    } else {
      verb_function(verb)(ctx);
    }
    write_manifest(ctx, "manifest-" + verb + ".json");
    return kExitOk;
  } catch (const Error& e) {
    return report_error(category_name(e.category()), e.what(), exit_status(e.category()));
  } catch (const std::exception& e) {
    return report_error("io", e.what(), kExitIo);
  }
}

}  // namespace softle::cli
