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
// Binary model files.
//
// Layout (all integers and doubles little-endian):
//
//   "FDA1"            magic
//   u32 version       kModelFormatVersion
//   u32 kind          1 = core, 2 = core + adaptation head
//   u32 layer_count   then per layer: u32 in, u32 out, u32 activation
//   u32 feature_dim   f64 target_scale, f64 mean[dim], f64 std[dim]
//   u64 param_count   f64 params[param_count]
//   u64 seed          u32 config_len, config_len bytes of JSON
//
// Parameters are flattened row-major in declaration order: each core layer's
// weights then biases, then (kind 2) W, b, v, w_s, b_s of the adapter.

#ifndef FORMANT_DA_MODEL_IO_H_
#define FORMANT_DA_MODEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "formant_da/adaptation.h"
#include "formant_da/nn.h"

namespace formant_da {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Training provenance echoed into the model file.
struct Provenance {
  std::uint64_t seed = 0;
  std::string config_json;

  bool operator==(const Provenance&) const = default;
};

struct LoadedModel {
  std::variant<CoreModel, DaModel> model;
  Provenance provenance;

  bool is_da() const { return std::holds_alternative<DaModel>(model); }
  // The core of either kind.
  const CoreModel& core() const;
};

std::string SerializeModel(const CoreModel& model, const Provenance& prov = {});
std::string SerializeModel(const DaModel& model, const Provenance& prov = {});
LoadedModel DeserializeModel(std::string_view bytes);

void SaveModel(const CoreModel& model, const std::filesystem::path& path,
               const Provenance& prov = {});
void SaveModel(const DaModel& model, const std::filesystem::path& path,
               const Provenance& prov = {});
LoadedModel LoadModel(const std::filesystem::path& path);

// JSON echo of a training configuration, stored as provenance.
std::string ConfigJson(const TrainConfig& cfg, std::string_view regime);

}  // namespace formant_da

#endif  // FORMANT_DA_MODEL_IO_H_
