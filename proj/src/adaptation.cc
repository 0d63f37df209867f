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
#include "formant_da/adaptation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace formant_da {

namespace {

constexpr double kGateClamp = 500.0;
// Largest double below 1.
constexpr double kGateMax = 1.0 - 0x1.0p-53;

void CheckFeatureLength(std::span<const double> c, const AdaptationLayer& layer) {
  if (c.size() != layer.gate_weights.size()) {
    throw std::invalid_argument("gate input length does not match gate weights");
  }
}

}  // namespace

AdaptationLayer IdentityInit() {
  AdaptationLayer layer;
  for (int i = 0; i < kNumFormants; ++i) layer.W(i, i) = 1.0;
  return layer;
}

double SelectionGate(std::span<const double> c, const AdaptationLayer& layer) {
  CheckFeatureLength(c, layer);
  double z = layer.gate_bias;
  for (size_t k = 0; k < c.size(); ++k) z += layer.gate_weights[k] * c[k];
  z = std::clamp(z, -kGateClamp, kGateClamp);
  return std::min(1.0 / (1.0 + std::exp(-z)), kGateMax);
}

Formants AdaptedEstimate(const Formants& f, double s,
                         const AdaptationLayer& layer) {
  Formants g;
  for (int i = 0; i < kNumFormants; ++i) {
    double acc = 0.0;
    for (int j = 0; j < kNumFormants; ++j) acc += layer.W(i, j) * f[j];
    g[i] = acc + layer.offset[i] + layer.gate_gain[i] * s;
  }
  return g;
}

Formants AdaptedEstimate(const Formants& f, std::span<const double> c,
                         const AdaptationLayer& layer) {
  return AdaptedEstimate(f, SelectionGate(c, layer), layer);
}

void AdapterGradients::Clear() {
  std::fill(gate_weights.begin(), gate_weights.end(), 0.0);
  gate_bias = 0.0;
  mix.fill(0.0);
  offset.fill(0.0);
  gate_gain.fill(0.0);
  core_output.fill(0.0);
}

void AdapterBackward(const Formants& f, std::span<const double> c, double s,
                     const Formants& d_g, const AdaptationLayer& layer,
                     AdapterGradients& grads) {
  CheckFeatureLength(c, layer);
  if (grads.gate_weights.size() != c.size()) {
    throw std::invalid_argument("gradient buffer does not match gate weights");
  }
  double d_s = 0.0;
  for (int i = 0; i < kNumFormants; ++i) {
    for (int j = 0; j < kNumFormants; ++j) {
      grads.mix[i * kNumFormants + j] += d_g[i] * f[j];
    }
    grads.offset[i] += d_g[i];
    grads.gate_gain[i] += d_g[i] * s;
    d_s += d_g[i] * layer.gate_gain[i];
  }
  const double d_z = d_s * s * (1.0 - s);
  if (d_z != 0.0) {
    for (size_t k = 0; k < c.size(); ++k) grads.gate_weights[k] += d_z * c[k];
  }
  grads.gate_bias += d_z;
  for (int j = 0; j < kNumFormants; ++j) {
    double acc = 0.0;
    for (int i = 0; i < kNumFormants; ++i) acc += d_g[i] * layer.W(i, j);
    grads.core_output[j] = acc;
  }
}

std::vector<ParamSlot> AdapterSlots(AdaptationLayer& layer,
                                    AdapterGradients& grads) {
  return {
      {layer.mix, grads.mix, false},
      {layer.offset, grads.offset, false},
      {layer.gate_gain, grads.gate_gain, false},
      {layer.gate_weights, grads.gate_weights, false},
      {std::span<double>(&layer.gate_bias, 1),
       std::span<const double>(&grads.gate_bias, 1), false},
  };
}

DaPrediction PredictDa(const DaModel& model, const FeatureVector& raw) {
  const FeatureVector c = ApplyNormalizer(model.core.normalizer, raw);
  const Vec out = Forward(model.core.net, c.values);
  if (out.size() != kNumFormants) {
    throw std::invalid_argument("core network must have 4 outputs");
  }
  Formants f;
  std::copy(out.begin(), out.end(), f.begin());
  DaPrediction p;
  p.gate = SelectionGate(c.values, model.adapter);
  const Formants g = AdaptedEstimate(f, p.gate, model.adapter);
  const double scale = model.core.normalizer.target_scale;
  for (int i = 0; i < kNumFormants; ++i) {
    p.core_hz[i] = f[i] / scale;
    p.adapted_hz[i] = g[i] / scale;
  }
  return p;
}

}  // namespace formant_da
