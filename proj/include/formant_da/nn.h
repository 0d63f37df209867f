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
// Dense feed-forward networks with exact backpropagation, Adam, and the
// fixed 350-1024-512-256-4 core formant regressor.

#ifndef FORMANT_DA_NN_H_
#define FORMANT_DA_NN_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "formant_da/common.h"
#include "formant_da/features.h"

namespace formant_da {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation : std::uint32_t { kRelu = 0, kSigmoid = 1, kIdentity = 2 };

const char* ActivationName(Activation a);

struct LayerSpec {
  int in = 0;
  int out = 0;
  Activation activation = Activation::kIdentity;
};

struct DenseLayer {
  RowMatrix weights;  // out x in
  Eigen::VectorXd biases;
  Activation activation = Activation::kIdentity;

  LayerSpec spec() const {
    return {static_cast<int>(weights.cols()), static_cast<int>(weights.rows()),
            activation};
  }
};

struct Mlp {
  std::vector<DenseLayer> layers;

  int input_dim() const;
  int output_dim() const;
  std::vector<LayerSpec> architecture() const;
  size_t parameter_count() const;
};

// 350 -> 1024 -> 512 -> 256 (ReLU) -> 4 (linear).
std::vector<LayerSpec> CoreArchitecture();

// The core regressor together with the feature statistics it was trained
// on. Outputs are in units of normalizer.target_scale (kHz by default).
struct CoreModel {
  Mlp net;
  Normalizer normalizer;
};

// He-uniform weights (bound sqrt(6 / fan_in)), zero biases. Deterministic
// in the seed on every platform.
Mlp MlpInit(std::span<const LayerSpec> architecture, std::uint64_t seed);

// Column-per-example batch. activations[0] is the input, activations[l+1]
// the output of layer l; pre_activations[l] is the affine part of layer l.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> activations;

  const Eigen::MatrixXd& output() const { return activations.back(); }
};

ForwardCache Forward(const Mlp& net, const Eigen::MatrixXd& inputs);
Vec Forward(const Mlp& net, std::span<const double> x);

struct LayerGradients {
  RowMatrix weights;
  Eigen::VectorXd biases;
};

struct MlpGradients {
  std::vector<LayerGradients> layers;
  Eigen::MatrixXd inputs;  // d loss / d input, same shape as the batch
};

// Gradients summed over the batch columns of d_output.
MlpGradients Backward(const Mlp& net, const ForwardCache& cache,
                      const Eigen::MatrixXd& d_output);

enum class LossKind { kMae, kMse };

const char* LossName(LossKind kind);
LossKind ParseLossKind(const std::string& name);

// Mean over masked-in components; masked-out components get zero gradient.
std::pair<double, Formants> LossAndGrad(const Formants& pred,
                                        const Formants& target,
                                        const FormantMask& mask, LossKind kind);

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Vec> first_moment;
  std::vector<Vec> second_moment;
};

// A flat view of one parameter tensor and its gradient.
struct ParamSlot {
  std::span<double> values;
  std::span<const double> grads;
  bool frozen = false;
};

// One Adam update. Frozen slots are left bitwise untouched, moments
// included. Moments are allocated on first use.
void OptimizerStep(std::span<const ParamSlot> slots, AdamState& state);

std::vector<ParamSlot> MlpSlots(Mlp& net, MlpGradients& grads, bool frozen);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  bool freeze_core = false;
  LossKind loss = LossKind::kMae;
  // Epochs without held-out improvement before stopping; 0 disables the
  // held-out split entirely.
  int patience = 0;
};

void ValidateConfig(const TrainConfig& cfg);

// Raw (unnormalized) features in, formants in Hz out.
Formants PredictCore(const CoreModel& model, const FeatureVector& raw);

}  // namespace formant_da

#endif  // FORMANT_DA_NN_H_
