/*
Copyright 2026 The formant-da Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include "formant_da/nn.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "formant_da/random.h"

namespace formant_da {

namespace {

void ApplyActivation(Activation a, const Eigen::MatrixXd& z,
                     Eigen::MatrixXd& out) {
  switch (a) {
    case Activation::kRelu:
      out = z.cwiseMax(0.0);
      return;
    case Activation::kSigmoid:
      out = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      return;
    case Activation::kIdentity:
      out = z;
      return;
  }
  throw std::invalid_argument("unknown activation");
}

// d activation / d pre-activation, multiplied into upstream in place.
void ApplyActivationGrad(Activation a, const Eigen::MatrixXd& z,
                         const Eigen::MatrixXd& post, Eigen::MatrixXd& upstream) {
  switch (a) {
    case Activation::kRelu:
      upstream = (z.array() > 0.0).select(upstream, 0.0);
      return;
    case Activation::kSigmoid:
      upstream.array() *= post.array() * (1.0 - post.array());
      return;
    case Activation::kIdentity:
      return;
  }
  throw std::invalid_argument("unknown activation");
}

}  // namespace

const char* ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
  }
  return "unknown";
}

int Mlp::input_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols());
}

int Mlp::output_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows());
}

std::vector<LayerSpec> Mlp::architecture() const {
  std::vector<LayerSpec> specs;
  for (const DenseLayer& l : layers) specs.push_back(l.spec());
  return specs;
}

size_t Mlp::parameter_count() const {
  size_t n = 0;
  for (const DenseLayer& l : layers) n += l.weights.size() + l.biases.size();
  return n;
}

std::vector<LayerSpec> CoreArchitecture() {
  return {{kFeatureDim, 1024, Activation::kRelu},
          {1024, 512, Activation::kRelu},
          {512, 256, Activation::kRelu},
          {256, kNumFormants, Activation::kIdentity}};
}

Mlp MlpInit(std::span<const LayerSpec> architecture, std::uint64_t seed) {
  if (architecture.empty()) throw std::invalid_argument("empty architecture");
  Mlp net;
  Rng rng(seed);
  int prev_out = architecture.front().in;
  for (const LayerSpec& s : architecture) {
    if (s.in <= 0 || s.out <= 0 || s.in != prev_out) {
      throw std::invalid_argument("inconsistent layer sizes");
    }
    prev_out = s.out;
    DenseLayer layer;
    layer.activation = s.activation;
    layer.weights.resize(s.out, s.in);
    layer.biases = Eigen::VectorXd::Zero(s.out);
    const double bound = std::sqrt(6.0 / s.in);
    double* w = layer.weights.data();
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      w[i] = rng.Uniform(-bound, bound);
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

ForwardCache Forward(const Mlp& net, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != net.input_dim()) {
    throw std::invalid_argument("input dimension does not match network");
  }
  if (!inputs.allFinite()) throw NumericError("non-finite network input");
  ForwardCache cache;
  cache.pre_activations.resize(net.layers.size());
  cache.activations.resize(net.layers.size() + 1);
  cache.activations[0] = inputs;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    Eigen::MatrixXd& z = cache.pre_activations[l];
    z.noalias() = layer.weights * cache.activations[l];
    z.colwise() += layer.biases;
    ApplyActivation(layer.activation, z, cache.activations[l + 1]);
  }
  return cache;
}

Vec Forward(const Mlp& net, std::span<const double> x) {
  const Eigen::MatrixXd in =
      Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const ForwardCache cache = Forward(net, in);
  const Eigen::MatrixXd& out = cache.output();
  return Vec(out.data(), out.data() + out.size());
}

MlpGradients Backward(const Mlp& net, const ForwardCache& cache,
                      const Eigen::MatrixXd& d_output) {
  if (cache.activations.size() != net.layers.size() + 1 ||
      d_output.rows() != net.output_dim() ||
      d_output.cols() != cache.output().cols()) {
    throw std::invalid_argument("gradient shape does not match forward cache");
  }
  MlpGradients grads;
  grads.layers.resize(net.layers.size());
  Eigen::MatrixXd upstream = d_output;
  for (size_t l = net.layers.size(); l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    ApplyActivationGrad(layer.activation, cache.pre_activations[l],
                        cache.activations[l + 1], upstream);
    LayerGradients& g = grads.layers[l];
    g.weights.noalias() = upstream * cache.activations[l].transpose();
    g.biases = upstream.rowwise().sum();
    Eigen::MatrixXd next;
    next.noalias() = layer.weights.transpose() * upstream;
    upstream = std::move(next);
  }
  grads.inputs = std::move(upstream);
  return grads;
}

const char* LossName(LossKind kind) {
  return kind == LossKind::kMae ? "mae" : "mse";
}

LossKind ParseLossKind(const std::string& name) {
  if (name == "mae") return LossKind::kMae;
  if (name == "mse") return LossKind::kMse;
  throw std::invalid_argument("unknown loss '" + name + "' (expected mae|mse)");
}

std::pair<double, Formants> LossAndGrad(const Formants& pred,
                                        const Formants& target,
                                        const FormantMask& mask,
                                        LossKind kind) {
  const int count = static_cast<int>(std::count(mask.begin(), mask.end(), true));
  if (count == 0) throw std::invalid_argument("loss mask selects no formant");
  double loss = 0.0;
  Formants grad = {0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < kNumFormants; ++i) {
    if (!mask[i]) continue;
    const double d = pred[i] - target[i];
    if (kind == LossKind::kMae) {
      loss += std::abs(d);
      grad[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / count;
    } else {
      loss += d * d;
      grad[i] = 2.0 * d / count;
    }
  }
  return {loss / count, grad};
}

void OptimizerStep(std::span<const ParamSlot> slots, AdamState& state) {
  if (state.first_moment.empty()) {
    for (const ParamSlot& s : slots) {
      state.first_moment.emplace_back(s.values.size(), 0.0);
      state.second_moment.emplace_back(s.values.size(), 0.0);
    }
  }
  if (state.first_moment.size() != slots.size()) {
    throw std::invalid_argument("optimizer state does not match parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (size_t k = 0; k < slots.size(); ++k) {
    const ParamSlot& s = slots[k];
    Vec& m = state.first_moment[k];
    Vec& v = state.second_moment[k];
    if (s.grads.size() != s.values.size() || m.size() != s.values.size()) {
      throw std::invalid_argument("parameter and gradient shapes differ");
    }
    if (s.frozen) continue;
    for (size_t i = 0; i < s.values.size(); ++i) {
      const double g = s.grads[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      s.values[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

std::vector<ParamSlot> MlpSlots(Mlp& net, MlpGradients& grads, bool frozen) {
  if (grads.layers.size() != net.layers.size()) {
    throw std::invalid_argument("gradient layer count differs from network");
  }
  std::vector<ParamSlot> slots;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    DenseLayer& layer = net.layers[l];
    LayerGradients& g = grads.layers[l];
    slots.push_back({{layer.weights.data(), static_cast<size_t>(layer.weights.size())},
                     {g.weights.data(), static_cast<size_t>(g.weights.size())},
                     frozen});
    slots.push_back({{layer.biases.data(), static_cast<size_t>(layer.biases.size())},
                     {g.biases.data(), static_cast<size_t>(g.biases.size())},
                     frozen});
  }
  return slots;
}

void ValidateConfig(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  // A zero learning rate is accepted as a no-op run.
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
  if (cfg.patience < 0) throw std::invalid_argument("patience must be >= 0");
}

Formants PredictCore(const CoreModel& model, const FeatureVector& raw) {
  const FeatureVector c = ApplyNormalizer(model.normalizer, raw);
  const Vec out = Forward(model.net, c.values);
  if (out.size() != kNumFormants) {
    throw std::invalid_argument("core network must have 4 outputs");
  }
  Formants hz;
  for (int i = 0; i < kNumFormants; ++i) {
    hz[i] = out[i] / model.normalizer.target_scale;
  }
  return hz;
}

}  // namespace formant_da
