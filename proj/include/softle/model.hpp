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

#include <vector>

#include "softle/rng.hpp"
#include "softle/types.hpp"

namespace softle {

/// Affine map `weights * x + bias`; weights are (outputs x inputs).
struct Layer {
  Matrix weights;
  Vector bias;
};

/// Softmax classifier. kLinear has one layer; kMlp has a tanh hidden layer
/// followed by the output layer.
struct ClassifierParams {
  Arch arch = Arch::kLinear;
  std::vector<Layer> layers;

  int num_inputs() const { return static_cast<int>(layers.front().weights.cols()); }
  int num_outputs() const { return static_cast<int>(layers.back().weights.rows()); }
  int hidden_size() const {
    return arch == Arch::kMlp ? static_cast<int>(layers.front().weights.rows()) : 0;
  }

  static ClassifierParams zeros(Arch arch, int num_inputs, int num_outputs, int hidden_size);

  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static ClassifierParams initialize(Arch arch, int num_inputs, int num_outputs,
                                     int hidden_size, Rng& rng);

  /// Throws kShape on inconsistent layer shapes, kFormat on non-finite entries.
  void validate() const;

  friend bool operator==(const ClassifierParams& a, const ClassifierParams& b);
};

/// Gradient of a scalar loss with respect to every entry of ClassifierParams.
struct Gradients {
  std::vector<Layer> layers;

  static Gradients zeros_like(const ClassifierParams& params);
  bool all_finite() const;
  Gradients& operator*=(double scale);
};

struct ForwardResult {
  Vector logits;
  Vector probs;
  Vector hidden;  // tanh activations; empty for linear models
};

/// Numerically stable softmax (max-shifted).
Vector softmax(const Vector& logits);

ForwardResult forward(const ClassifierParams& params, const Vector& x);

/// Probability floor applied inside the log.
inline constexpr double kProbFloor = 1e-12;

/// -sum_j target_j * log(max(probs_j, kProbFloor)). Terms with a zero target
/// contribute nothing.
double cross_entropy(const Vector& probs, const Vector& target);

/// Accumulates `scale` times the parameter gradient implied by `logit_grad`
/// (dLoss/dlogits) for input `x` into `grads`.
void accumulate_gradients(const ClassifierParams& params, const Vector& x,
                          const ForwardResult& fwd, const Vector& logit_grad,
                          double scale, Gradients& grads);

/// Gradient of cross_entropy(softmax(f(x)), target). At the logits this is
/// probs - target.
Gradients backward(const ClassifierParams& params, const Vector& x, const Vector& target);

/// SGD or Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8). Moment buffers are
/// allocated lazily on the first step.
class Optimizer {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  explicit Optimizer(OptimizerKind kind) : kind_(kind) {}

  /// Throws kDivergence if any gradient is non-finite; params are untouched then.
  void step(ClassifierParams& params, const Gradients& grads, double learning_rate);

  OptimizerKind kind() const { return kind_; }
  long steps() const { return steps_; }
  const std::vector<Layer>& first_moment() const { return m_; }
  const std::vector<Layer>& second_moment() const { return v_; }

 private:
  OptimizerKind kind_;
  long steps_ = 0;
  std::vector<Layer> m_;
  std::vector<Layer> v_;
};

}  // namespace softle
