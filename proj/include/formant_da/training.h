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
// The three training regimes: core training on one corpus, adaptation-head
// training on pooled corpora with the core frozen, and joint training of the
// whole adapted network from scratch.

#ifndef FORMANT_DA_TRAINING_H_
#define FORMANT_DA_TRAINING_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "formant_da/adaptation.h"
#include "formant_da/dataset.h"
#include "formant_da/manifest.h"
#include "formant_da/nn.h"

namespace formant_da {

// Called after every epoch with (epoch index, mean training loss).
using EpochCallback = std::function<void(int, double)>;

// Fits the normalizer on `examples` and trains a freshly initialized core.
CoreModel TrainCore(const ExampleSet& examples, const TrainConfig& cfg,
                    const EpochCallback& on_epoch = {});
CoreModel TrainCore(const Manifest& manifest, const TrainConfig& cfg,
                    const EpochCallback& on_epoch = {});

// Starts from IdentityInit() and updates only the adapter. The core and its
// normalizer are copied into the result unchanged; cfg.freeze_core is forced.
DaModel TrainAdaptation(const CoreModel& core, const ExampleSet& pooled,
                        TrainConfig cfg, const EpochCallback& on_epoch = {});
DaModel TrainAdaptation(const CoreModel& core,
                        std::span<const Manifest> manifests, TrainConfig cfg,
                        const EpochCallback& on_epoch = {});

// Core from He initialization, adapter from identity, all trained together
// on the pooled examples with a normalizer fit on the pool.
DaModel TrainJoint(const ExampleSet& pooled, const TrainConfig& cfg,
                   const EpochCallback& on_epoch = {});
DaModel TrainJoint(std::span<const Manifest> manifests, const TrainConfig& cfg,
                   const EpochCallback& on_epoch = {});

// Defaults for the adaptation step: the head has a few hundred parameters
// and needs larger steps than the core to move by hundreds of Hz.
TrainConfig DefaultAdaptationConfig();

// Mean per-example training loss (targets in model units).
double MeanLoss(const CoreModel& model, const ExampleSet& examples,
                LossKind kind);
double MeanLoss(const DaModel& model, const ExampleSet& examples,
                LossKind kind);

}  // namespace formant_da

#endif  // FORMANT_DA_TRAINING_H_
