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
#include "formant_da/model_io.h"

#include <cmath>
#include <cstring>
#include <limits>

#include "json.hpp"

#include "formant_da/io_util.h"

namespace formant_da {

namespace {

constexpr char kMagic[4] = {'F', 'D', 'A', '1'};
constexpr std::uint32_t kKindCore = 1;
constexpr std::uint32_t kKindDa = 2;
constexpr size_t kAdapterFixedParams =
    kNumFormants * kNumFormants + 2 * kNumFormants + 1;

class Writer {
 public:
  void Bytes(const void* p, size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void F64(double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    U64(bits);
  }
  void F64s(const double* p, size_t n) {
    for (size_t i = 0; i < n; ++i) F64(p[i]);
  }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("model file is truncated");
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double F64() {
    const std::uint64_t bits = U64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
  std::string_view Take(size_t n) {
    Need(n);
    std::string_view v = bytes_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

void WriteCore(Writer& w, const CoreModel& model, std::uint32_t kind,
               size_t extra_params) {
  w.Bytes(kMagic, 4);
  w.U32(kModelFormatVersion);
  w.U32(kind);
  w.U32(static_cast<std::uint32_t>(model.net.layers.size()));
  for (const DenseLayer& l : model.net.layers) {
    w.U32(static_cast<std::uint32_t>(l.weights.cols()));
    w.U32(static_cast<std::uint32_t>(l.weights.rows()));
    w.U32(static_cast<std::uint32_t>(l.activation));
  }
  const Normalizer& n = model.normalizer;
  if (n.feature_std.size() != n.feature_mean.size() ||
      n.feature_mean.size() != static_cast<size_t>(model.net.input_dim())) {
    throw std::invalid_argument("normalizer does not match network input");
  }
  w.U32(static_cast<std::uint32_t>(n.feature_mean.size()));
  w.F64(n.target_scale);
  w.F64s(n.feature_mean.data(), n.feature_mean.size());
  w.F64s(n.feature_std.data(), n.feature_std.size());
  w.U64(model.net.parameter_count() + extra_params);
  for (const DenseLayer& l : model.net.layers) {
    w.F64s(l.weights.data(), static_cast<size_t>(l.weights.size()));
    w.F64s(l.biases.data(), static_cast<size_t>(l.biases.size()));
  }
}

void WriteProvenance(Writer& w, const Provenance& prov) {
  w.U64(prov.seed);
  w.U32(static_cast<std::uint32_t>(prov.config_json.size()));
  w.Bytes(prov.config_json.data(), prov.config_json.size());
}

double FiniteParam(Reader& r) {
  const double v = r.F64();
  if (!std::isfinite(v)) throw DataError("model file contains a non-finite value");
  return v;
}

}  // namespace

const CoreModel& LoadedModel::core() const {
  if (const auto* da = std::get_if<DaModel>(&model)) return da->core;
  return std::get<CoreModel>(model);
}

std::string SerializeModel(const CoreModel& model, const Provenance& prov) {
  Writer w;
  WriteCore(w, model, kKindCore, 0);
  WriteProvenance(w, prov);
  return w.Take();
}

std::string SerializeModel(const DaModel& model, const Provenance& prov) {
  const AdaptationLayer& a = model.adapter;
  if (a.gate_weights.size() != static_cast<size_t>(model.core.net.input_dim())) {
    throw std::invalid_argument("gate weights do not match network input");
  }
  Writer w;
  WriteCore(w, model.core, kKindDa, kAdapterFixedParams + a.gate_weights.size());
  w.F64s(a.mix.data(), a.mix.size());
  w.F64s(a.offset.data(), a.offset.size());
  w.F64s(a.gate_gain.data(), a.gate_gain.size());
  w.F64s(a.gate_weights.data(), a.gate_weights.size());
  w.F64(a.gate_bias);
  WriteProvenance(w, prov);
  return w.Take();
}

LoadedModel DeserializeModel(std::string_view bytes) {
  Reader r(bytes);
  if (r.Take(4) != std::string_view(kMagic, 4)) {
    throw DataError("not a model file (bad magic)");
  }
  const std::uint32_t version = r.U32();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const std::uint32_t kind = r.U32();
  if (kind != kKindCore && kind != kKindDa) {
    throw DataError("unknown model kind " + std::to_string(kind));
  }
  const std::uint32_t n_layers = r.U32();
  if (n_layers == 0 || n_layers > 64) throw DataError("bad layer count");
  std::vector<LayerSpec> arch;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    LayerSpec s;
    const std::uint32_t in = r.U32();
    const std::uint32_t out = r.U32();
    const std::uint32_t act = r.U32();
    if (in == 0 || out == 0 || in > (1u << 20) || out > (1u << 20)) {
      throw DataError("bad layer size");
    }
    if (act > static_cast<std::uint32_t>(Activation::kIdentity)) {
      throw DataError("unknown activation code");
    }
    if (!arch.empty() && static_cast<int>(in) != arch.back().out) {
      throw DataError("layer sizes do not chain");
    }
    s.in = static_cast<int>(in);
    s.out = static_cast<int>(out);
    s.activation = static_cast<Activation>(act);
    arch.push_back(s);
  }
  if (arch.back().out != kNumFormants) {
    throw DataError("model output dimension must be 4");
  }
  const std::uint32_t dim = r.U32();
  if (static_cast<int>(dim) != arch.front().in) {
    throw DataError("normalizer dimension does not match network input");
  }
  CoreModel core;
  core.normalizer.target_scale = FiniteParam(r);
  if (!(core.normalizer.target_scale > 0.0)) throw DataError("bad target scale");
  r.Need(static_cast<size_t>(dim) * 16);
  core.normalizer.feature_mean.resize(dim);
  core.normalizer.feature_std.resize(dim);
  for (double& v : core.normalizer.feature_mean) v = FiniteParam(r);
  for (double& v : core.normalizer.feature_std) {
    v = FiniteParam(r);
    if (!(v > 0.0)) throw DataError("normalizer std must be positive");
  }

  size_t expected = 0;
  for (const LayerSpec& s : arch) {
    expected += static_cast<size_t>(s.in) * s.out + s.out;
  }
  if (kind == kKindDa) expected += kAdapterFixedParams + dim;
  const std::uint64_t stored = r.U64();
  if (stored != expected) {
    throw DataError("parameter count mismatch: file declares " +
                    std::to_string(stored) + ", architecture needs " +
                    std::to_string(expected));
  }
  r.Need(expected * 8);
  for (const LayerSpec& s : arch) {
    DenseLayer l;
    l.activation = s.activation;
    l.weights.resize(s.out, s.in);
    l.biases.resize(s.out);
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) {
      l.weights.data()[i] = FiniteParam(r);
    }
    for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases[i] = FiniteParam(r);
    core.net.layers.push_back(std::move(l));
  }

  LoadedModel loaded;
  if (kind == kKindDa) {
    DaModel da;
    AdaptationLayer& a = da.adapter;
    for (double& v : a.mix) v = FiniteParam(r);
    for (double& v : a.offset) v = FiniteParam(r);
    for (double& v : a.gate_gain) v = FiniteParam(r);
    a.gate_weights.assign(dim, 0.0);
    for (double& v : a.gate_weights) v = FiniteParam(r);
    a.gate_bias = FiniteParam(r);
    da.core = std::move(core);
    loaded.model = std::move(da);
  } else {
    loaded.model = std::move(core);
  }
  loaded.provenance.seed = r.U64();
  const std::uint32_t config_len = r.U32();
  loaded.provenance.config_json = std::string(r.Take(config_len));
  if (r.remaining() != 0) throw DataError("trailing bytes after model data");
  return loaded;
}

void SaveModel(const CoreModel& model, const std::filesystem::path& path,
               const Provenance& prov) {
  WriteFileAtomic(path, SerializeModel(model, prov));
}

void SaveModel(const DaModel& model, const std::filesystem::path& path,
               const Provenance& prov) {
  WriteFileAtomic(path, SerializeModel(model, prov));
}

LoadedModel LoadModel(const std::filesystem::path& path) {
  try {
    return DeserializeModel(ReadFileBytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string ConfigJson(const TrainConfig& cfg, std::string_view regime) {
  nlohmann::ordered_json j;
  j["regime"] = regime;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["seed"] = cfg.seed;
  j["freeze_core"] = cfg.freeze_core;
  j["loss"] = LossName(cfg.loss);
  j["patience"] = cfg.patience;
  return j.dump();
}

}  // namespace formant_da
