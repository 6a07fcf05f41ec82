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

#include "softle/model.hpp"

#include <cmath>
#include <string>

#include "softle/error.hpp"

namespace softle {

namespace {

Layer zero_layer(int outputs, int inputs) {
  return Layer{Matrix::Zero(outputs, inputs), Vector::Zero(outputs)};
}

std::vector<Layer> zero_layers_like(const std::vector<Layer>& layers) {
  std::vector<Layer> out;
  out.reserve(layers.size());
  for (const Layer& l : layers) {
    out.push_back(zero_layer(static_cast<int>(l.weights.rows()), static_cast<int>(l.weights.cols())));
  }
  return out;
}

}  // namespace

ClassifierParams ClassifierParams::zeros(Arch arch, int num_inputs, int num_outputs,
                                         int hidden_size) {
  if (num_inputs <= 0 || num_outputs <= 0) fail(ErrorCategory::kShape, "classifier needs positive shape");
  ClassifierParams p;
  p.arch = arch;
  if (arch == Arch::kLinear) {
    p.layers.push_back(zero_layer(num_outputs, num_inputs));
  } else {
    if (hidden_size <= 0) fail(ErrorCategory::kShape, "mlp needs a positive hidden size");
    p.layers.push_back(zero_layer(hidden_size, num_inputs));
    p.layers.push_back(zero_layer(num_outputs, hidden_size));
  }
  return p;
}

ClassifierParams ClassifierParams::initialize(Arch arch, int num_inputs, int num_outputs,
                                              int hidden_size, Rng& rng) {
  ClassifierParams p = zeros(arch, num_inputs, num_outputs, hidden_size);
  for (Layer& l : p.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weights.cols()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = rng.uniform(-bound, bound);
  }
  return p;
}

void ClassifierParams::validate() const {
  const std::size_t expected = arch == Arch::kLinear ? 1 : 2;
  if (layers.size() != expected) {
    fail(ErrorCategory::kShape, std::string(to_string(arch)) + " classifier expects " +
                                    std::to_string(expected) + " layer(s)");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.weights.rows() == 0 || l.weights.cols() == 0) fail(ErrorCategory::kShape, "empty layer");
    if (l.bias.size() != l.weights.rows()) fail(ErrorCategory::kShape, "bias length != layer outputs");
    if (i > 0 && l.weights.cols() != layers[i - 1].weights.rows()) {
      fail(ErrorCategory::kShape, "layer inputs do not match previous layer outputs");
    }
    if (!l.weights.allFinite() || !l.bias.allFinite()) {
      fail(ErrorCategory::kFormat, "non-finite classifier parameter");
    }
  }
}

bool operator==(const ClassifierParams& a, const ClassifierParams& b) {
  if (a.arch != b.arch || a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const Layer& x = a.layers[i];
    const Layer& y = b.layers[i];
    if (x.weights.rows() != y.weights.rows() || x.weights.cols() != y.weights.cols()) return false;
    if (x.weights != y.weights || x.bias != y.bias) return false;
  }
  return true;
}

Gradients Gradients::zeros_like(const ClassifierParams& params) {
  return Gradients{zero_layers_like(params.layers)};
}

bool Gradients::all_finite() const {
  for (const Layer& l : layers) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Gradients& Gradients::operator*=(double scale) {
  for (Layer& l : layers) {
    l.weights *= scale;
    l.bias *= scale;
  }
  return *this;
}

Vector softmax(const Vector& logits) {
  const double max = logits.maxCoeff();
  Vector e = (logits.array() - max).exp();
  return e / e.sum();
}

ForwardResult forward(const ClassifierParams& params, const Vector& x) {
  if (x.size() != params.num_inputs()) {
    fail(ErrorCategory::kShape, "input has " + std::to_string(x.size()) + " features, model expects " +
                                    std::to_string(params.num_inputs()));
  }
  if (!x.allFinite()) fail(ErrorCategory::kFormat, "non-finite input feature");
  ForwardResult r;
  if (params.arch == Arch::kLinear) {
    const Layer& out = params.layers[0];
    r.logits = out.weights * x + out.bias;
  } else {
    const Layer& hid = params.layers[0];
    const Layer& out = params.layers[1];
    r.hidden = (hid.weights * x + hid.bias).array().tanh();
    r.logits = out.weights * r.hidden + out.bias;
  }
  r.probs = softmax(r.logits);
  return r;
}

double cross_entropy(const Vector& probs, const Vector& target) {
  if (probs.size() != target.size()) {
    fail(ErrorCategory::kShape, "cross_entropy: probs has " + std::to_string(probs.size()) +
                                    " entries, target " + std::to_string(target.size()));
  }
  double loss = 0.0;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (target[j] == 0.0) continue;
    loss -= target[j] * std::log(std::max(probs[j], kProbFloor));
  }
  return loss;
}

void accumulate_gradients(const ClassifierParams& params, const Vector& x,
                          const ForwardResult& fwd, const Vector& logit_grad, double scale,
                          Gradients& grads) {
  if (logit_grad.size() != params.num_outputs()) {
    fail(ErrorCategory::kShape, "logit gradient length does not match model outputs");
  }
  if (params.arch == Arch::kLinear) {
    Layer& g = grads.layers[0];
    g.weights.noalias() += scale * logit_grad * x.transpose();
    g.bias.noalias() += scale * logit_grad;
    return;
  }
  const Layer& out = params.layers[1];
  Layer& g_hid = grads.layers[0];
  Layer& g_out = grads.layers[1];
  g_out.weights.noalias() += scale * logit_grad * fwd.hidden.transpose();
  g_out.bias.noalias() += scale * logit_grad;
  // d tanh(u)/du = 1 - tanh(u)^2
  const Vector hidden_grad =
      ((out.weights.transpose() * logit_grad).array() * (1.0 - fwd.hidden.array().square())).matrix();
  g_hid.weights.noalias() += scale * hidden_grad * x.transpose();
  g_hid.bias.noalias() += scale * hidden_grad;
}

Gradients backward(const ClassifierParams& params, const Vector& x, const Vector& target) {
  const ForwardResult fwd = forward(params, x);
  if (target.size() != fwd.probs.size()) {
    fail(ErrorCategory::kShape, "target length does not match model outputs");
  }
  Gradients grads = Gradients::zeros_like(params);
  accumulate_gradients(params, x, fwd, fwd.probs - target, 1.0, grads);
  return grads;
}

void Optimizer::step(ClassifierParams& params, const Gradients& grads, double learning_rate) {
  if (grads.layers.size() != params.layers.size()) fail(ErrorCategory::kShape, "gradient/param layer mismatch");
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    if (grads.layers[i].weights.rows() != params.layers[i].weights.rows() ||
        grads.layers[i].weights.cols() != params.layers[i].weights.cols() ||
        grads.layers[i].bias.size() != params.layers[i].bias.size()) {
      fail(ErrorCategory::kShape, "gradient/param shape mismatch");
    }
  }
  if (!grads.all_finite()) fail(ErrorCategory::kDivergence, "non-finite gradient");
  ++steps_;

  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
      params.layers[i].weights -= learning_rate * grads.layers[i].weights;
      params.layers[i].bias -= learning_rate * grads.layers[i].bias;
    }
    return;
  }

  if (m_.empty()) {
    m_ = zero_layers_like(params.layers);
    v_ = zero_layers_like(params.layers);
  }
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(steps_));
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    param.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + kEpsilon);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weights, grads.layers[i].weights, m_[i].weights, v_[i].weights);
    update(params.layers[i].bias, grads.layers[i].bias, m_[i].bias, v_[i].bias);
  }
}

}  // namespace softle
