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
// formant-da: corpus synthesis, training, estimation and evaluation.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "formant_da/adaptation.h"
#include "formant_da/dataset.h"
#include "formant_da/eval.h"
#include "formant_da/io_util.h"
#include "formant_da/manifest.h"
#include "formant_da/model_io.h"
#include "formant_da/synth.h"
#include "formant_da/training.h"
#include "formant_da/wav.h"

namespace fs = std::filesystem;
using namespace formant_da;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Globals {
  std::uint64_t seed = 42;
  bool verbose = false;
};

struct TrainFlags {
  int epochs = 0;
  double lr = 0.0;
  int batch = 0;
  std::string loss;
};

void AddTrainFlags(CLI::App* cmd, TrainFlags& flags, const TrainConfig& defaults) {
  flags.epochs = defaults.epochs;
  flags.lr = defaults.learning_rate;
  flags.batch = defaults.batch_size;
  flags.loss = LossName(defaults.loss);
  cmd->add_option("--epochs", flags.epochs, "Training epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lr", flags.lr, "Adam learning rate")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--batch", flags.batch, "Mini-batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--loss", flags.loss, "Training loss")
      ->check(CLI::IsMember({"mae", "mse"}))
      ->capture_default_str();
}

TrainConfig MakeConfig(const TrainFlags& flags, const TrainConfig& defaults,
                       const Globals& g) {
  TrainConfig cfg = defaults;
  cfg.epochs = flags.epochs;
  cfg.learning_rate = flags.lr;
  cfg.batch_size = flags.batch;
  cfg.loss = ParseLossKind(flags.loss);
  cfg.seed = g.seed;
  return cfg;
}

EpochCallback Progress(const Globals& g, const char* regime) {
  if (!g.verbose) return {};
  return [regime](int epoch, double loss) {
    std::fprintf(stderr, "%s epoch %d loss %.6f\n", regime, epoch + 1, loss);
  };
}

std::vector<Manifest> LoadManifests(const std::vector<std::string>& paths) {
  std::vector<Manifest> out;
  for (const std::string& p : paths) out.push_back(LoadManifest(p));
  return out;
}

std::string FormatCsvRow(const char* label, const Formants& hz, const std::string& gate) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f,%.2f,%.2f,%s\n", label, hz[0], hz[1],
                hz[2], hz[3], gate.c_str());
  return buf;
}

int RunSynth(const Globals& g, const std::string& domain, int count,
             const std::string& out) {
  DomainSpec spec;
  if (auto builtin = BuiltinDomain(domain)) {
    spec = *builtin;
  } else if (fs::exists(domain)) {
    spec = ParseDomainJson(ReadFileBytes(domain));
  } else {
    throw std::invalid_argument("unknown domain '" + domain +
                                "' (expected adult_male, child or a JSON file)");
  }
  const Manifest m = GenerateCorpus(spec, count, g.seed, out);
  if (g.verbose) {
    std::fprintf(stderr, "wrote %zu vowels to %s\n", m.entries.size(), out.c_str());
  }
  return 0;
}

int RunEstimate(const std::string& model_path, const std::string& wav_path,
                double start, double end) {
  const LoadedModel loaded = LoadModel(model_path);
  if (end <= 0.0) {
    const WavData wav = ReadWav(wav_path);
    end = static_cast<double>(wav.samples.size()) / wav.sample_rate;
  }
  Manifest m;
  ManifestEntry e;
  e.path = fs::absolute(wav_path).string();
  e.start_s = start;
  e.end_s = end;
  if (!(end > start) || start < 0.0) {
    throw std::invalid_argument("need 0 <= --start < --end");
  }
  m.entries.push_back(e);
  const FeatureVector features = ExtractFeatures(LoadSegment(m, 0));

  std::string out = "output,f1_hz,f2_hz,f3_hz,f4_hz,s\n";
  if (const auto* da = std::get_if<DaModel>(&loaded.model)) {
    const DaPrediction p = PredictDa(*da, features);
    char gate[32];
    std::snprintf(gate, sizeof(gate), "%.6f", p.gate);
    out += FormatCsvRow("core", p.core_hz, "");
    out += FormatCsvRow("adapted", p.adapted_hz, gate);
  } else {
    out += FormatCsvRow("core", PredictCore(loaded.core(), features), "");
  }
  std::fputs(out.c_str(), stdout);
  return 0;
}

int RunEvaluate(const std::string& model_path, const std::string& manifest_path,
                const std::string& out_path) {
  const LoadedModel loaded = LoadModel(model_path);
  const Manifest m = LoadManifest(manifest_path);
  const ExampleSet ex = ExtractExamples(m);
  FormantMask requested = {false, false, false, false};
  for (const FormantMask& mask : ex.masks) {
    for (int k = 0; k < kNumFormants; ++k) requested[k] = requested[k] || mask[k];
  }
  std::vector<EvalReport> reports;
  if (const auto* da = std::get_if<DaModel>(&loaded.model)) {
    reports.push_back(MaeReport("domain_adaptation", PredictAll(*da, ex), ex, requested));
  } else {
    reports.push_back(MaeReport("core", PredictAll(loaded.core(), ex), ex, requested));
  }
  WriteFileAtomic(out_path, ReportCsv(reports));
  std::fputs(ReportTable(reports).c_str(), stdout);
  return 0;
}

int RunHistogram(const std::string& model_path, const std::string& manifest_path,
                 const std::string& out_path) {
  const LoadedModel loaded = LoadModel(model_path);
  const auto* da = std::get_if<DaModel>(&loaded.model);
  if (da == nullptr) {
    throw DataError(model_path + ": not a domain-adaptation model");
  }
  const std::vector<GateHistogram> hists = SHistogram(*da, LoadManifest(manifest_path));
  WriteFileAtomic(out_path, HistogramCsv(hists));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain-adaptive formant estimation"};
  app.require_subcommand(1);
  // Lets --seed and --verbose follow the subcommand name too.
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for synthesis and training")
      ->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Progress on stderr");

  std::string domain, out, manifest, model, core, wav;
  std::vector<std::string> manifests;
  int count = 0;
  double start = 0.0;
  double end = 0.0;

  auto* synth = app.add_subcommand("synth", "Synthesize a vowel corpus");
  synth->add_option("--domain", domain, "adult_male, child, or a domain JSON file")
      ->required();
  synth->add_option("--count", count, "Number of vowels")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--out", out, "Output directory")->required();

  const TrainConfig core_defaults;
  const TrainConfig adapt_defaults = DefaultAdaptationConfig();
  TrainFlags core_flags, adapt_flags, joint_flags;

  auto* train_core = app.add_subcommand("train-core", "Train the core network");
  train_core->add_option("--manifest", manifest, "Training manifest")->required();
  train_core->add_option("--out", out, "Output model file")->required();
  AddTrainFlags(train_core, core_flags, core_defaults);

  auto* train_adapt =
      app.add_subcommand("train-adapt", "Train the adaptation head on a frozen core");
  train_adapt->add_option("--core", core, "Core model file")->required();
  train_adapt->add_option("--manifest", manifests, "Training manifest (repeatable)")
      ->required();
  train_adapt->add_option("--out", out, "Output model file")->required();
  AddTrainFlags(train_adapt, adapt_flags, adapt_defaults);

  auto* train_joint =
      app.add_subcommand("train-joint", "Train core and adaptation head together");
  train_joint->add_option("--manifest", manifests, "Training manifest (repeatable)")
      ->required();
  train_joint->add_option("--out", out, "Output model file")->required();
  AddTrainFlags(train_joint, joint_flags, core_defaults);

  auto* estimate = app.add_subcommand("estimate", "Estimate formants of one segment");
  estimate->add_option("--model", model, "Model file")->required();
  estimate->add_option("--wav", wav, "16-bit PCM mono WAV")->required();
  estimate->add_option("--start", start, "Segment start (s)");
  estimate->add_option("--end", end, "Segment end (s); default end of file");

  auto* evaluate = app.add_subcommand("evaluate", "Per-formant MAE report");
  evaluate->add_option("--model", model, "Model file")->required();
  evaluate->add_option("--manifest", manifest, "Evaluation manifest")->required();
  evaluate->add_option("--out", out, "Report CSV")->required();

  auto* s_hist = app.add_subcommand("s-hist", "Selection-gate histogram");
  s_hist->add_option("--model", model, "Domain-adaptation model file")->required();
  s_hist->add_option("--manifest", manifest, "Manifest")->required();
  s_hist->add_option("--out", out, "Histogram CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) return RunSynth(g, domain, count, out);
    if (train_core->parsed()) {
      const TrainConfig cfg = MakeConfig(core_flags, core_defaults, g);
      const CoreModel m =
          TrainCore(LoadManifest(manifest), cfg, Progress(g, "train-core"));
      SaveModel(m, out, {cfg.seed, ConfigJson(cfg, "core")});
      return 0;
    }
    if (train_adapt->parsed()) {
      const TrainConfig cfg = MakeConfig(adapt_flags, adapt_defaults, g);
      const LoadedModel loaded = LoadModel(core);
      const DaModel m = TrainAdaptation(loaded.core(), LoadManifests(manifests), cfg,
                                        Progress(g, "train-adapt"));
      SaveModel(m, out, {cfg.seed, ConfigJson(cfg, "adaptation")});
      return 0;
    }
    if (train_joint->parsed()) {
      const TrainConfig cfg = MakeConfig(joint_flags, core_defaults, g);
      const DaModel m =
          TrainJoint(LoadManifests(manifests), cfg, Progress(g, "train-joint"));
      SaveModel(m, out, {cfg.seed, ConfigJson(cfg, "joint")});
      return 0;
    }
    if (estimate->parsed()) return RunEstimate(model, wav, start, end);
    if (evaluate->parsed()) return RunEvaluate(model, manifest, out);
    if (s_hist->parsed()) return RunHistogram(model, manifest, out);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "formant-da: usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "formant-da: numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "formant-da: data error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
