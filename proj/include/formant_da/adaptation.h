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
// Domain-adaptation head placed on top of a frozen core network.
//
// A scalar selection gate s(c) = sigmoid(w_s . c + b_s) looks at the same
// normalized feature vector c the core consumes. The adapted estimate is
//
//   g_i = sum_j W_ij f_j + b_i + v_i * s(c)
//
// where f is the core output. W, b, v, w_s and b_s are the only trainable
// parameters in the second training step.

#ifndef FORMANT_DA_ADAPTATION_H_
#define FORMANT_DA_ADAPTATION_H_

#include <array>
#include <span>
#include <vector>

#include "formant_da/common.h"
#include "formant_da/features.h"
#include "formant_da/nn.h"

namespace formant_da {

struct AdaptationLayer {
  Vec gate_weights = Vec(kFeatureDim, 0.0);  // w_s
  double gate_bias = 0.0;                    // b_s
  std::array<double, kNumFormants * kNumFormants> mix{};  // W, row-major
  Formants offset = {0.0, 0.0, 0.0, 0.0};      // b
  Formants gate_gain = {0.0, 0.0, 0.0, 0.0};   // v

  double& W(int i, int j) { return mix[i * kNumFormants + j]; }
  double W(int i, int j) const { return mix[i * kNumFormants + j]; }
};

struct DaModel {
  CoreModel core;
  AdaptationLayer adapter;
};

// W = I, everything else zero: the adapted output equals the core output.
AdaptationLayer IdentityInit();

// Logistic gate; the argument is clamped to +-500 and the result kept
// strictly inside (0, 1).
double SelectionGate(std::span<const double> c, const AdaptationLayer& layer);

Formants AdaptedEstimate(const Formants& f, double s,
                         const AdaptationLayer& layer);
Formants AdaptedEstimate(const Formants& f, std::span<const double> c,
                         const AdaptationLayer& layer);

struct AdapterGradients {
  Vec gate_weights = Vec(kFeatureDim, 0.0);
  double gate_bias = 0.0;
  std::array<double, kNumFormants * kNumFormants> mix{};
  Formants offset = {0.0, 0.0, 0.0, 0.0};
  Formants gate_gain = {0.0, 0.0, 0.0, 0.0};
  Formants core_output = {0.0, 0.0, 0.0, 0.0};  // d loss / d f

  void Clear();
};

// Adds the gradients of one example into `grads` (accumulating, so a batch
// can be summed). core_output is overwritten, not accumulated.
void AdapterBackward(const Formants& f, std::span<const double> c, double s,
                     const Formants& d_g, const AdaptationLayer& layer,
                     AdapterGradients& grads);

std::vector<ParamSlot> AdapterSlots(AdaptationLayer& layer,
                                    AdapterGradients& grads);

struct DaPrediction {
  Formants core_hz;
  Formants adapted_hz;
  double gate = 0.0;
};

// Raw (unnormalized) features in.
DaPrediction PredictDa(const DaModel& model, const FeatureVector& raw);

}  // namespace formant_da

#endif  // FORMANT_DA_ADAPTATION_H_
