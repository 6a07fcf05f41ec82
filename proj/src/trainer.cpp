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

#include "softle/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "softle/error.hpp"
#include "softle/eval.hpp"
#include "softle/io.hpp"

namespace softle {

std::vector<LossKind> TrainingLog::loss_kinds() const {
  std::vector<LossKind> kinds;
  kinds.reserve(epochs.size());
  for (const auto& e : epochs) kinds.push_back(e.loss_kind);
  return kinds;
}

std::string format_training_logs(const std::vector<TrainingLog>& logs) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::ostringstream out;
  out << "model,epoch,mean_loss,loss_kind,train_accuracy,train_overconfidence,id_accuracy,"
         "ood_accuracy,id_overconfidence,ood_overconfidence\n";
  for (const auto& log : logs) {
    for (const auto& e : log.epochs) {
      out << log.model << ',' << e.epoch << ',' << format_double(e.mean_loss) << ','
          << to_string(e.loss_kind) << ',' << format_double(e.train_accuracy) << ','
          << format_double(e.train_overconfidence) << ',' << opt(e.id_accuracy) << ','
          << opt(e.ood_accuracy) << ',' << opt(e.id_overconfidence) << ','
          << opt(e.ood_overconfidence) << '\n';
    }
  }
  return out.str();
}

double scheduled_learning_rate(double base, long step, long total_steps, bool warmup) {
  if (!warmup || total_steps <= 1) return base;
  const long warm = std::max(1L, std::lround(0.1 * static_cast<double>(total_steps)));
  if (step < warm) return base * static_cast<double>(step + 1) / static_cast<double>(warm);
  return base * static_cast<double>(total_steps - step) / static_cast<double>(total_steps - warm);
}

TrainingLog fit(ClassifierParams& params, const Dataset& train,
                const std::function<EpochObjective(int epoch)>& plan, const FitOptions& options,
                Rng& shuffle_rng, std::string model_name) {
  if (train.empty()) fail(ErrorCategory::kShape, "cannot train on an empty dataset");
  if (options.epochs <= 0 || options.batch_size <= 0) {
    fail(ErrorCategory::kConfig, "epochs and batch size must be positive");
  }
  params.validate();

  const std::size_t n = train.size();
  const auto batch = static_cast<std::size_t>(options.batch_size);
  const long steps_per_epoch = static_cast<long>((n + batch - 1) / batch);
  const long total_steps = steps_per_epoch * options.epochs;

  TrainingLog log;
  log.model = std::move(model_name);
  Optimizer optimizer(options.optimizer);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector logit_grad(params.num_outputs());
  long step = 0;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const EpochObjective objective = plan(epoch);
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      Gradients grads = Gradients::zeros_like(params);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const Vector& x = train[idx].features;
        const ForwardResult fwd = forward(params, x);
        logit_grad.setZero();
        const double loss = objective.objective(idx, fwd, logit_grad);
        if (!std::isfinite(loss)) {
          fail(ErrorCategory::kDivergence, log.model + ": non-finite loss at epoch " +
                                               std::to_string(epoch) + ", sample id " +
                                               std::to_string(train[idx].id));
        }
        loss_sum += loss;
        accumulate_gradients(params, x, fwd, logit_grad, 1.0, grads);
      }
      grads *= 1.0 / static_cast<double>(end - start);
      const double lr = scheduled_learning_rate(options.learning_rate, step, total_steps, options.warmup);
      try {
        optimizer.step(params, grads, lr);
      } catch (const Error& e) {
        fail(e.category(), log.model + ": " + e.what() + " at epoch " + std::to_string(epoch));
      }
      ++step;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss_kind = objective.kind;
    rec.mean_loss = loss_sum / static_cast<double>(n);
    rec.train_accuracy = accuracy(params, train, true);
    rec.train_overconfidence = overconfidence_ratio(params, train, options.xi);
    if (options.id_test != nullptr) {
      rec.id_accuracy = accuracy(params, *options.id_test, true);
      rec.id_overconfidence = overconfidence_ratio(params, *options.id_test, options.xi);
    }
    if (options.ood_test != nullptr) {
      rec.ood_accuracy = accuracy(params, *options.ood_test, true);
      rec.ood_overconfidence = overconfidence_ratio(params, *options.ood_test, options.xi);
    }
    log.epochs.push_back(rec);
  }
  return log;
}

SampleObjective cross_entropy_objective(const std::vector<Vector>& targets,
                                        const std::vector<double>* weights) {
  return [&targets, weights](std::size_t index, const ForwardResult& fwd, Vector& logit_grad) {
    const Vector& y = targets[index];
    const double w = weights != nullptr ? (*weights)[index] : 1.0;
    logit_grad = w * (fwd.probs - y);
    return w * cross_entropy(fwd.probs, y);
  };
}

}  // namespace softle
