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

#include <stdexcept>

#include "doctest.h"
#include "formant_da/model_io.h"
#include "formant_da/synth.h"
#include "temp_dir.h"

namespace formant_da {
namespace {

// Small corpora shared by every case in this file.
struct Corpora {
  testing_util::TempDir dir;
  Manifest adult;
  Manifest child;
  ExampleSet adult_ex;
  ExampleSet child_ex;

  Corpora() {
    adult = GenerateCorpus(AdultMaleDomain(), 12, 1, dir / "adult");
    child = GenerateCorpus(ChildDomain(), 8, 2, dir / "child");
    adult_ex = ExtractExamples(adult);
    child_ex = ExtractExamples(child);
  }
};

const Corpora& Data() {
  static const Corpora corpora;
  return corpora;
}

TrainConfig Quick(int epochs = 2) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 4;
  return cfg;
}

TEST_CASE("Zero learning rate leaves the initialization in place") {
  Manifest one = Data().adult;
  one.entries.resize(1);
  TrainConfig cfg = Quick(1);
  cfg.learning_rate = 0.0;
  const CoreModel m = TrainCore(one, cfg);
  const Mlp init = MlpInit(CoreArchitecture(), cfg.seed);
  for (size_t l = 0; l < init.layers.size(); ++l) {
    CHECK(m.net.layers[l].weights == init.layers[l].weights);
    CHECK(m.net.layers[l].biases == init.layers[l].biases);
  }
}

TEST_CASE("Core training is deterministic and uses the corpus statistics") {
  const CoreModel a = TrainCore(Data().adult_ex, Quick());
  const CoreModel b = TrainCore(Data().adult_ex, Quick());
  CHECK(SerializeModel(a) == SerializeModel(b));
  CHECK(a.normalizer.feature_mean == FitNormalizer(Data().adult_ex.features).feature_mean);

  TrainConfig other = Quick();
  other.seed = 7;
  CHECK(SerializeModel(TrainCore(Data().adult_ex, other)) != SerializeModel(a));
}

TEST_CASE("Core training reduces the training loss") {
  std::vector<double> losses;
  TrainCore(Data().adult_ex, Quick(30), [&](int, double loss) { losses.push_back(loss); });
  REQUIRE(losses.size() == 30);
  CHECK(losses.back() < losses.front());
}

TEST_CASE("Held-out patience stops early without error") {
  TrainConfig cfg = Quick(40);
  cfg.patience = 2;
  int epochs = 0;
  TrainCore(Data().adult_ex, cfg, [&](int, double) { ++epochs; });
  CHECK(epochs >= 1);
  CHECK(epochs <= 40);
}

TEST_CASE("Adaptation never touches the core") {
  const CoreModel core = TrainCore(Data().adult_ex, Quick());
  const std::string before = SerializeModel(core);
  const Manifest pool[] = {Data().adult, Data().child};
  const DaModel da = TrainAdaptation(core, pool, Quick(5));
  CHECK(SerializeModel(core) == before);
  CHECK(SerializeModel(da.core) == before);
  const AdaptationLayer id = IdentityInit();
  CHECK(da.adapter.mix != id.mix);
}

TEST_CASE("Adaptation with zero learning rate is the core") {
  const CoreModel core = TrainCore(Data().adult_ex, Quick());
  ExampleSet pool = Data().adult_ex;
  pool.Append(Data().child_ex);
  TrainConfig cfg = Quick(2);
  cfg.learning_rate = 0.0;
  const DaModel da = TrainAdaptation(core, pool, cfg);
  const AdaptationLayer id = IdentityInit();
  CHECK(da.adapter.mix == id.mix);
  CHECK(da.adapter.gate_weights == id.gate_weights);
  for (const FeatureVector& f : pool.features) {
    CHECK(PredictDa(da, f).adapted_hz == PredictCore(core, f));
  }
  // Identity start: the pooled loss equals the frozen core's exactly.
  CHECK(MeanLoss(da, pool, LossKind::kMae) == MeanLoss(core, pool, LossKind::kMae));
}

TEST_CASE("Adaptation lowers the pooled loss") {
  const CoreModel core = TrainCore(Data().adult_ex, Quick(10));
  ExampleSet pool = Data().adult_ex;
  pool.Append(Data().child_ex);
  const DaModel da = TrainAdaptation(core, pool, DefaultAdaptationConfig());
  CHECK(MeanLoss(da, pool, LossKind::kMae) < MeanLoss(core, pool, LossKind::kMae));
}

TEST_CASE("Joint training") {
  const Manifest pool[] = {Data().adult, Data().child};
  const DaModel a = TrainJoint(pool, Quick());
  const DaModel b = TrainJoint(pool, Quick());
  CHECK(SerializeModel(a) == SerializeModel(b));
  CHECK(SerializeModel(a.core) != SerializeModel(TrainCore(Data().adult_ex, Quick())));

  const Manifest single[] = {Data().adult};
  CHECK_NOTHROW(TrainJoint(single, Quick(1)));
}

TEST_CASE("Training errors") {
  CHECK_THROWS_AS(TrainCore(Manifest{}, Quick()), DataError);
  CHECK_THROWS_AS(TrainJoint(std::span<const Manifest>(), Quick()), std::invalid_argument);
  const CoreModel core = TrainCore(Data().adult_ex, Quick(1));
  CHECK_THROWS_AS(TrainAdaptation(core, std::span<const Manifest>(), Quick()),
                  std::invalid_argument);

  ExampleSet unlabeled = Data().adult_ex;
  unlabeled.masks[3] = {false, false, false, false};
  CHECK_THROWS_AS(TrainCore(unlabeled, Quick()), DataError);

  TrainConfig bad = Quick();
  bad.batch_size = 0;
  CHECK_THROWS_AS(TrainCore(Data().adult_ex, bad), std::invalid_argument);
}

TEST_CASE("Extraction reports the failing entry") {
  testing_util::TempDir dir;
  Manifest m = Data().adult;
  m.entries[2].path = "missing.wav";
  try {
    ExtractExamples(m);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("missing.wav") != std::string::npos);
  }
}

TEST_CASE("Extraction order does not depend on the worker count") {
  setenv("FORMANT_DA_THREADS", "1", 1);
  const ExampleSet one = ExtractExamples(Data().adult);
  setenv("FORMANT_DA_THREADS", "3", 1);
  CHECK(WorkerCount() == 3);
  const ExampleSet three = ExtractExamples(Data().adult);
  unsetenv("FORMANT_DA_THREADS");
  REQUIRE(one.size() == three.size());
  for (size_t i = 0; i < one.size(); ++i) CHECK(one.features[i].values == three.features[i].values);
}

}  // namespace
}  // namespace formant_da
