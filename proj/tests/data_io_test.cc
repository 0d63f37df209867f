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
#include <cstring>
#include <random>
#include <string>

#include "doctest.h"
#include "formant_da/io_util.h"
#include "formant_da/manifest.h"
#include "formant_da/model_io.h"
#include "formant_da/synth.h"
#include "formant_da/wav.h"
#include "temp_dir.h"

namespace formant_da {
namespace {

// 44-byte canonical header for 16 kHz mono PCM16 with `n` samples.
std::string Header(std::uint32_t n) {
  auto u32 = [](std::uint32_t v) {
    return std::string{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
  };
  auto u16 = [](std::uint16_t v) {
    return std::string{static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  };
  return "RIFF" + u32(36 + 2 * n) + "WAVE" + "fmt " + u32(16) + u16(1) + u16(1) +
         u32(16000) + u32(32000) + u16(2) + u16(16) + "data" + u32(2 * n);
}

std::string Bytes(std::initializer_list<int> b) {
  std::string s;
  for (int v : b) s.push_back(static_cast<char>(v));
  return s;
}

TEST_CASE("WAV byte fixture decodes exactly") {
  const std::string file = Header(5) + Bytes({0x00, 0x00, 0x00, 0x40, 0x00, 0xC0, 0xFF, 0x7F, 0x00, 0x80});
  const WavData w = DecodeWav(file);
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples == Vec{0.0, 0.5, -0.5, 32767.0 / 32768.0, -1.0});
}

TEST_CASE("WAV encoding matches the fixture") {
  const std::string want = Header(4) + Bytes({0x00, 0x00, 0x00, 0x40, 0x00, 0xC0, 0xFF, 0x7F});
  CHECK(EncodeWav(Vec{0.0, 0.5, -0.5, 1.0}, 16000) == want);
}

TEST_CASE("WAV quantization rounds half away from zero") {
  const WavData w = DecodeWav(EncodeWav(Vec{0.5 / 32768, -0.5 / 32768, 1.5 / 32768, -1.5 / 32768}, 16000));
  CHECK(w.samples == Vec{1.0 / 32768, -1.0 / 32768, 2.0 / 32768, -2.0 / 32768});
  CHECK_THROWS_AS(EncodeWav(Vec{1.5}, 16000), std::invalid_argument);
}

TEST_CASE("WAV round trip") {
  testing_util::TempDir dir;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec x(1000);
  for (double& v : x) v = u(gen);
  WriteWav(dir / "a.wav", x, 22050);
  const WavData w = ReadWav(dir / "a.wav");
  CHECK(w.sample_rate == 22050);
  REQUIRE(w.samples.size() == x.size());
  for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(w.samples[i] - x[i]) <= 0.5 / 32768 + 1e-15);

  WriteWav(dir / "z.wav", Vec(64, 0.0), 16000);
  CHECK(ReadWav(dir / "z.wav").samples == Vec(64, 0.0));
}

TEST_CASE("WAV errors") {
  testing_util::TempDir dir;
  CHECK_THROWS_AS(ReadWav(dir / "missing.wav"), DataError);
  CHECK_THROWS_AS(DecodeWav("RIFF"), DataError);
  std::string stereo = Header(2) + Bytes({0, 0, 0, 0});
  stereo[22] = 2;
  CHECK_THROWS_AS(DecodeWav(stereo), DataError);
  std::string bits8 = Header(2) + Bytes({0, 0, 0, 0});
  bits8[34] = 8;
  CHECK_THROWS_AS(DecodeWav(bits8), DataError);
  std::string floaty = Header(2) + Bytes({0, 0, 0, 0});
  floaty[20] = 3;
  CHECK_THROWS_AS(DecodeWav(floaty), DataError);
}

TEST_CASE("Manifest format contract") {
  const std::string header(kManifestHeader);
  CHECK(ParseManifest(header + "\n").entries.empty());
  CHECK(ParseManifest(header).entries.empty());

  const Manifest m = ParseManifest(header + "\na.wav,0.1,0.3,512,1920,,\n", "clopper");
  REQUIRE(m.entries.size() == 1);
  const ManifestEntry& e = m.entries[0];
  CHECK(e.mask == FormantMask{true, true, false, false});
  CHECK(e.formants[0] == 512.0);
  CHECK(e.formants[1] == 1920.0);
  CHECK(e.start_s == 0.1);
  CHECK(e.end_s == 0.3);
  CHECK(e.domain == "clopper");

  const Manifest q = ParseManifest(header + "\r\n\"dir, x/b.wav\",0,1,,,,,kids\r\n\r\n");
  REQUIRE(q.entries.size() == 1);
  CHECK(q.entries[0].path == "dir, x/b.wav");
  CHECK(q.entries[0].mask == FormantMask{false, false, false, false});
  CHECK(q.entries[0].domain == "kids");
}

TEST_CASE("Manifest errors carry line numbers") {
  const std::string header(kManifestHeader);
  CHECK_THROWS_AS(ParseManifest(""), DataError);
  CHECK_THROWS_AS(ParseManifest("path,start,end\n"), DataError);
  try {
    ParseManifest(header + "\na.wav,0,1,500,1500,2500,3500,x\nb.wav,0,1,1500,500,,,x\n");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseManifest(header + "\na.wav,0.3,0.1,,,,,x\n"), DataError);
  CHECK_THROWS_AS(ParseManifest(header + "\na.wav,zero,0.1,,,,,x\n"), DataError);
  CHECK_THROWS_AS(ParseManifest(header + "\na.wav,0,0.1,,,\n"), DataError);
  CHECK_THROWS_AS(ParseManifest(header + "\na.wav,0,0.1,-5,,,,x\n"), DataError);
}

TEST_CASE("Manifest round trip on a synthetic corpus") {
  testing_util::TempDir dir;
  const Manifest m = GenerateCorpus(ChildDomain(), 500, 11, dir / "c");
  Manifest edited = m;
  edited.entries[3].mask[2] = false;
  edited.entries[3].formants[2] = 0.0;
  edited.entries[4].start_s = 0.05;
  edited.entries[4].end_s = 0.25;
  SaveManifest(edited, dir / "c" / "edited.csv");
  const Manifest back = LoadManifest(dir / "c" / "edited.csv");
  CHECK(back.name == "edited");
  CHECK(back.entries == edited.entries);
  CHECK(FormatManifest(back) == FormatManifest(edited));

  const Segment seg = LoadSegment(back, 4);
  CHECK(seg.samples.size() == 3200);
  CHECK(seg.domain_label == "child");
  CHECK(seg.mask == back.entries[4].mask);
}

TEST_CASE("LoadSegment errors") {
  testing_util::TempDir dir;
  Manifest m = GenerateCorpus(AdultMaleDomain(), 1, 2, dir.path());
  m.entries[0].end_s = 5.0;
  CHECK_THROWS_AS(LoadSegment(m, 0), DataError);
  m.entries[0].path = "nope.wav";
  m.entries[0].end_s = 0.1;
  CHECK_THROWS_AS(LoadSegment(m, 0), DataError);
}

DaModel RandomDaModel(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  DaModel m;
  m.core.net = MlpInit(CoreArchitecture(), seed);
  for (auto& layer : m.core.net.layers) {
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i) layer.biases(i) = normal(gen);
  }
  m.core.normalizer.feature_mean = Vec(kFeatureDim);
  m.core.normalizer.feature_std = Vec(kFeatureDim);
  for (int i = 0; i < kFeatureDim; ++i) {
    m.core.normalizer.feature_mean[i] = normal(gen);
    m.core.normalizer.feature_std[i] = 1.0 + std::abs(normal(gen));
  }
  m.adapter = IdentityInit();
  for (double& w : m.adapter.gate_weights) w = 0.01 * normal(gen);
  for (double& w : m.adapter.mix) w += 0.1 * normal(gen);
  m.adapter.gate_bias = normal(gen);
  m.adapter.offset = {normal(gen), normal(gen), normal(gen), normal(gen)};
  m.adapter.gate_gain = {normal(gen), normal(gen), normal(gen), normal(gen)};
  return m;
}

TEST_CASE("Model round trip is bit exact") {
  testing_util::TempDir dir;
  const DaModel m = RandomDaModel(4);
  const Provenance prov{42, ConfigJson(TrainConfig{}, "two_step")};
  SaveModel(m, dir / "m.fda", prov);
  const LoadedModel loaded = LoadModel(dir / "m.fda");
  REQUIRE(loaded.is_da());
  CHECK(loaded.provenance == prov);
  const DaModel& back = std::get<DaModel>(loaded.model);
  CHECK(SerializeModel(back, prov) == ReadFileBytes(dir / "m.fda"));

  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    FeatureVector raw{Vec(kFeatureDim)};
    for (double& v : raw.values) v = normal(gen);
    const DaPrediction a = PredictDa(m, raw);
    const DaPrediction b = PredictDa(back, raw);
    CHECK(a.adapted_hz == b.adapted_hz);
    CHECK(a.gate == b.gate);
  }

  SaveModel(m.core, dir / "c.fda");
  const LoadedModel core = LoadModel(dir / "c.fda");
  CHECK_FALSE(core.is_da());
  CHECK(SerializeModel(core.core()) == ReadFileBytes(dir / "c.fda"));
  CHECK(SerializeModel(core.core()) == SerializeModel(back.core));
}

TEST_CASE("Model header layout") {
  const std::string bytes = SerializeModel(RandomDaModel(1).core);
  CHECK(bytes.substr(0, 4) == "FDA1");
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  CHECK(version == kModelFormatVersion);
}

TEST_CASE("Corrupted model files are rejected") {
  const DaModel m = RandomDaModel(2);
  const std::string good = SerializeModel(m, Provenance{1, "{}"});
  CHECK_NOTHROW(DeserializeModel(good));

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(DeserializeModel(bad_magic), DataError);

  std::string bad_version = good;
  bad_version[4] = 9;
  CHECK_THROWS_AS(DeserializeModel(bad_version), DataError);

  CHECK_THROWS_AS(DeserializeModel(good.substr(0, good.size() / 2)), DataError);
  CHECK_THROWS_AS(DeserializeModel(good + "x"), DataError);

  // param_count sits right after the normalizer block.
  const size_t layers_end = 4 + 4 + 4 + 4 + 4 * 12;
  const size_t count_at = layers_end + 4 + 8 + 2 * 8 * kFeatureDim;
  std::string bad_count = good;
  bad_count[count_at] ^= 1;
  CHECK_THROWS_AS(DeserializeModel(bad_count), DataError);

  std::string bad_layer = good;
  bad_layer[16] = 7;  // first layer's input size
  CHECK_THROWS_AS(DeserializeModel(bad_layer), DataError);
}

TEST_CASE("Config JSON echo") {
  TrainConfig cfg;
  cfg.epochs = 7;
  const std::string json = ConfigJson(cfg, "core");
  CHECK(json.find("\"epochs\":7") != std::string::npos);
  CHECK(json.find("\"regime\":\"core\"") != std::string::npos);
}

TEST_CASE("Atomic file writes") {
  testing_util::TempDir dir;
  WriteFileAtomic(dir / "f.bin", "abc");
  CHECK(ReadFileBytes(dir / "f.bin") == "abc");
  WriteFileAtomic(dir / "f.bin", "defg");
  CHECK(ReadFileBytes(dir / "f.bin") == "defg");
  CHECK_THROWS_AS(WriteFileAtomic(dir / "no" / "such" / "f.bin", "x"), DataError);
}

}  // namespace
}  // namespace formant_da
