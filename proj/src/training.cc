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
#include "formant_da/training.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "formant_da/random.h"

namespace formant_da {

namespace {

constexpr std::uint64_t kShuffleSeedMix = 0x9E3779B97F4A7C15ULL;
constexpr Eigen::Index kEvalChunk = 256;

void CheckExamples(const ExampleSet& ex) {
  if (ex.empty()) throw DataError("no training examples");
  if (ex.targets.size() != ex.size() || ex.masks.size() != ex.size()) {
    throw std::invalid_argument("example set columns differ in length");
  }
  for (size_t i = 0; i < ex.size(); ++i) {
    if (std::none_of(ex.masks[i].begin(), ex.masks[i].end(),
                     [](bool b) { return b; })) {
      throw DataError("example " + std::to_string(i) + " has no annotated formant");
    }
    if (ex.features[i].values.size() != static_cast<size_t>(kFeatureDim)) {
      throw std::invalid_argument("feature vector of wrong length");
    }
  }
}

// Normalized features, one column per example.
Eigen::MatrixXd NormalizedColumns(const Normalizer& n, const ExampleSet& ex) {
  Eigen::MatrixXd x(kFeatureDim, static_cast<Eigen::Index>(ex.size()));
  for (size_t i = 0; i < ex.size(); ++i) {
    const FeatureVector c = ApplyNormalizer(n, ex.features[i]);
    x.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(c.values.data(), kFeatureDim);
  }
  return x;
}

std::vector<Formants> ScaledTargets(const ExampleSet& ex, double scale) {
  std::vector<Formants> out(ex.size());
  for (size_t i = 0; i < ex.size(); ++i) {
    for (int k = 0; k < kNumFormants; ++k) out[i][k] = ex.targets[i][k] * scale;
  }
  return out;
}

Formants Column(const Eigen::MatrixXd& m, Eigen::Index col) {
  Formants f;
  for (int k = 0; k < kNumFormants; ++k) f[k] = m(k, col);
  return f;
}

// Core outputs for every column, computed in fixed-size chunks.
Eigen::MatrixXd CoreOutputs(const Mlp& net, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(kNumFormants, x.cols());
  for (Eigen::Index start = 0; start < x.cols(); start += kEvalChunk) {
    const Eigen::Index len = std::min(kEvalChunk, x.cols() - start);
    out.middleCols(start, len) = Forward(net, x.middleCols(start, len)).output();
  }
  return out;
}

struct LoopHooks {
  // Trains on one batch, returns the batch's summed loss.
  std::function<double(std::span<const size_t>)> step;
  // Mean loss over the given examples.
  std::function<double(std::span<const size_t>)> held_out_loss;
  std::function<void()> snapshot;
  std::function<void()> restore;
};

void RunEpochs(size_t n, const TrainConfig& cfg, const LoopHooks& hooks,
               const EpochCallback& on_epoch) {
  Rng rng(cfg.seed ^ kShuffleSeedMix);
  std::vector<size_t> train(n);
  std::iota(train.begin(), train.end(), 0);
  std::vector<size_t> held_out;
  const bool early_stop = cfg.patience > 0 && n >= 10;
  if (early_stop) {
    rng.Shuffle(std::span<size_t>(train));
    const size_t n_held = std::max<size_t>(1, n / 10);
    held_out.assign(train.end() - n_held, train.end());
    train.resize(n - n_held);
    std::sort(train.begin(), train.end());
  }
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const size_t batch = static_cast<size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(train));
    double total = 0.0;
    for (size_t start = 0; start < train.size(); start += batch) {
      const size_t len = std::min(batch, train.size() - start);
      total += hooks.step(std::span<const size_t>(train.data() + start, len));
    }
    if (on_epoch) on_epoch(epoch, total / static_cast<double>(train.size()));
    if (!early_stop) continue;
    const double loss = hooks.held_out_loss(held_out);
    if (loss < best) {
      best = loss;
      since_best = 0;
      hooks.snapshot();
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  if (early_stop) hooks.restore();
}

// Shared by the adaptation and joint regimes.
DaModel TrainDa(DaModel model, const ExampleSet& pooled, const TrainConfig& cfg,
                const EpochCallback& on_epoch) {
  ValidateConfig(cfg);
  CheckExamples(pooled);
  const Eigen::MatrixXd x = NormalizedColumns(model.core.normalizer, pooled);
  const std::vector<Formants> targets =
      ScaledTargets(pooled, model.core.normalizer.target_scale);
  // With the core frozen its outputs are fixed, so compute them once.
  Eigen::MatrixXd frozen_outputs;
  if (cfg.freeze_core) frozen_outputs = CoreOutputs(model.core.net, x);

  AdamState adam;
  adam.learning_rate = cfg.learning_rate;
  AdapterGradients head_grads;
  head_grads.gate_weights.assign(kFeatureDim, 0.0);

  auto example_loss = [&](const Formants& f, Eigen::Index col) {
    const Eigen::Map<const Eigen::VectorXd> c(x.col(col).data(), kFeatureDim);
    const std::span<const double> cs(c.data(), kFeatureDim);
    const Formants g = AdaptedEstimate(f, cs, model.adapter);
    return LossAndGrad(g, targets[col], pooled.masks[col], cfg.loss).first;
  };

  LoopHooks hooks;
  hooks.step = [&](std::span<const size_t> batch) {
    const auto b = static_cast<Eigen::Index>(batch.size());
    const double inv_b = 1.0 / static_cast<double>(b);
    Eigen::MatrixXd xb(kFeatureDim, b);
    for (Eigen::Index j = 0; j < b; ++j) xb.col(j) = x.col(batch[j]);
    ForwardCache cache;
    Eigen::MatrixXd fb;
    if (cfg.freeze_core) {
      fb.resize(kNumFormants, b);
      for (Eigen::Index j = 0; j < b; ++j) fb.col(j) = frozen_outputs.col(batch[j]);
    } else {
      cache = Forward(model.core.net, xb);
      fb = cache.output();
    }
    head_grads.Clear();
    Eigen::MatrixXd d_core(kNumFormants, b);
    double loss_sum = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) {
      const std::span<const double> c(xb.col(j).data(), kFeatureDim);
      const Formants f = Column(fb, j);
      const double s = SelectionGate(c, model.adapter);
      const Formants g = AdaptedEstimate(f, s, model.adapter);
      auto [loss, d_g] = LossAndGrad(g, targets[batch[j]], pooled.masks[batch[j]],
                                     cfg.loss);
      loss_sum += loss;
      for (double& v : d_g) v *= inv_b;
      AdapterBackward(f, c, s, d_g, model.adapter, head_grads);
      for (int k = 0; k < kNumFormants; ++k) d_core(k, j) = head_grads.core_output[k];
    }
    std::vector<ParamSlot> slots = AdapterSlots(model.adapter, head_grads);
    MlpGradients core_grads;
    if (!cfg.freeze_core) {
      core_grads = Backward(model.core.net, cache, d_core);
      std::vector<ParamSlot> core_slots = MlpSlots(model.core.net, core_grads, false);
      slots.insert(slots.begin(), core_slots.begin(), core_slots.end());
    }
    OptimizerStep(slots, adam);
    return loss_sum;
  };
  hooks.held_out_loss = [&](std::span<const size_t> idx) {
    double total = 0.0;
    for (size_t i : idx) {
      const auto col = static_cast<Eigen::Index>(i);
      Formants f;
      if (cfg.freeze_core) {
        f = Column(frozen_outputs, col);
      } else {
        const Vec out = Forward(model.core.net, std::span<const double>(
                                                    x.col(col).data(), kFeatureDim));
        std::copy(out.begin(), out.end(), f.begin());
      }
      total += example_loss(f, col);
    }
    return total / static_cast<double>(idx.size());
  };
  DaModel best = model;
  hooks.snapshot = [&] { best = model; };
  hooks.restore = [&] { model = best; };

  RunEpochs(pooled.size(), cfg, hooks, on_epoch);
  return model;
}

}  // namespace

CoreModel TrainCore(const ExampleSet& examples, const TrainConfig& cfg,
                    const EpochCallback& on_epoch) {
  ValidateConfig(cfg);
  CheckExamples(examples);
  CoreModel model;
  model.normalizer = FitNormalizer(examples.features);
  const std::vector<LayerSpec> arch = CoreArchitecture();
  model.net = MlpInit(arch, cfg.seed);

  const Eigen::MatrixXd x = NormalizedColumns(model.normalizer, examples);
  const std::vector<Formants> targets =
      ScaledTargets(examples, model.normalizer.target_scale);
  AdamState adam;
  adam.learning_rate = cfg.learning_rate;

  LoopHooks hooks;
  hooks.step = [&](std::span<const size_t> batch) {
    const auto b = static_cast<Eigen::Index>(batch.size());
    const double inv_b = 1.0 / static_cast<double>(b);
    Eigen::MatrixXd xb(kFeatureDim, b);
    for (Eigen::Index j = 0; j < b; ++j) xb.col(j) = x.col(batch[j]);
    const ForwardCache cache = Forward(model.net, xb);
    Eigen::MatrixXd d_out(kNumFormants, b);
    double loss_sum = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) {
      const auto [loss, grad] = LossAndGrad(Column(cache.output(), j),
                                            targets[batch[j]],
                                            examples.masks[batch[j]], cfg.loss);
      loss_sum += loss;
      for (int k = 0; k < kNumFormants; ++k) d_out(k, j) = grad[k] * inv_b;
    }
    MlpGradients grads = Backward(model.net, cache, d_out);
    const std::vector<ParamSlot> slots = MlpSlots(model.net, grads, false);
    OptimizerStep(slots, adam);
    return loss_sum;
  };
  hooks.held_out_loss = [&](std::span<const size_t> idx) {
    double total = 0.0;
    for (size_t i : idx) {
      const auto col = static_cast<Eigen::Index>(i);
      const Vec out =
          Forward(model.net, std::span<const double>(x.col(col).data(), kFeatureDim));
      Formants f;
      std::copy(out.begin(), out.end(), f.begin());
      total += LossAndGrad(f, targets[i], examples.masks[i], cfg.loss).first;
    }
    return total / static_cast<double>(idx.size());
  };
  Mlp best = model.net;
  hooks.snapshot = [&] { best = model.net; };
  hooks.restore = [&] { model.net = best; };

  RunEpochs(examples.size(), cfg, hooks, on_epoch);
  return model;
}

CoreModel TrainCore(const Manifest& manifest, const TrainConfig& cfg,
                    const EpochCallback& on_epoch) {
  ValidateConfig(cfg);
  if (manifest.entries.empty()) throw DataError("training manifest is empty");
  return TrainCore(ExtractExamples(manifest), cfg, on_epoch);
}

DaModel TrainAdaptation(const CoreModel& core, const ExampleSet& pooled,
                        TrainConfig cfg, const EpochCallback& on_epoch) {
  cfg.freeze_core = true;
  DaModel model{core, IdentityInit()};
  model.adapter.gate_weights.assign(
      static_cast<size_t>(core.net.input_dim()), 0.0);
  return TrainDa(std::move(model), pooled, cfg, on_epoch);
}

DaModel TrainAdaptation(const CoreModel& core,
                        std::span<const Manifest> manifests, TrainConfig cfg,
                        const EpochCallback& on_epoch) {
  ValidateConfig(cfg);
  if (manifests.empty()) throw std::invalid_argument("no adaptation manifests");
  return TrainAdaptation(core, ExtractExamples(manifests), cfg, on_epoch);
}

DaModel TrainJoint(const ExampleSet& pooled, const TrainConfig& cfg,
                   const EpochCallback& on_epoch) {
  ValidateConfig(cfg);
  CheckExamples(pooled);
  TrainConfig joint = cfg;
  joint.freeze_core = false;
  DaModel model;
  model.core.normalizer = FitNormalizer(pooled.features);
  const std::vector<LayerSpec> arch = CoreArchitecture();
  model.core.net = MlpInit(arch, cfg.seed);
  model.adapter = IdentityInit();
  return TrainDa(std::move(model), pooled, joint, on_epoch);
}

DaModel TrainJoint(std::span<const Manifest> manifests, const TrainConfig& cfg,
                   const EpochCallback& on_epoch) {
  ValidateConfig(cfg);
  if (manifests.empty()) throw std::invalid_argument("no training manifests");
  return TrainJoint(ExtractExamples(manifests), cfg, on_epoch);
}

TrainConfig DefaultAdaptationConfig() {
  TrainConfig cfg;
  cfg.epochs = 1000;
  cfg.batch_size = 128;
  cfg.learning_rate = 3e-3;
  cfg.freeze_core = true;
  return cfg;
}

double MeanLoss(const CoreModel& model, const ExampleSet& examples,
                LossKind kind) {
  CheckExamples(examples);
  const Eigen::MatrixXd out =
      CoreOutputs(model.net, NormalizedColumns(model.normalizer, examples));
  const std::vector<Formants> targets =
      ScaledTargets(examples, model.normalizer.target_scale);
  double total = 0.0;
  for (size_t i = 0; i < examples.size(); ++i) {
    total += LossAndGrad(Column(out, static_cast<Eigen::Index>(i)), targets[i],
                         examples.masks[i], kind)
                 .first;
  }
  return total / static_cast<double>(examples.size());
}

double MeanLoss(const DaModel& model, const ExampleSet& examples,
                LossKind kind) {
  CheckExamples(examples);
  const Eigen::MatrixXd x = NormalizedColumns(model.core.normalizer, examples);
  const Eigen::MatrixXd out = CoreOutputs(model.core.net, x);
  const std::vector<Formants> targets =
      ScaledTargets(examples, model.core.normalizer.target_scale);
  double total = 0.0;
  for (size_t i = 0; i < examples.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const Formants g = AdaptedEstimate(
        Column(out, col),
        std::span<const double>(x.col(col).data(), kFeatureDim), model.adapter);
    total += LossAndGrad(g, targets[i], examples.masks[i], kind).first;
  }
  return total / static_cast<double>(examples.size());
}

}  // namespace formant_da
