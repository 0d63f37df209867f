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
#include "formant_da/synth.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "formant_da/eval.h"
#include "formant_da/io_util.h"
#include "formant_da/signal.h"
#include "formant_da/wav.h"
#include "temp_dir.h"

namespace formant_da {
namespace {

// |X(f)| of a real sequence at an arbitrary frequency, by direct summation.
double DftMagnitude(const Vec& x, double hz, int rate) {
  std::complex<double> acc = 0.0;
  const double w = 2.0 * std::numbers::pi * hz / rate;
  for (size_t n = 0; n < x.size(); ++n) acc += x[n] * std::polar(1.0, -w * static_cast<double>(n));
  return std::abs(acc);
}

TEST_CASE("Impulse train source") {
  const Vec x = MakeSource(100.0, 0.1, 16000);
  REQUIRE(x.size() == 1600);
  for (size_t i = 0; i < x.size(); ++i) CHECK(x[i] == (i % 160 == 0 ? 1.0 : 0.0));
  CHECK_THROWS_AS(MakeSource(100.0, 0.0, 16000), std::invalid_argument);

  // Ten whole periods: energy only at multiples of 100 Hz.
  for (int k = 0; k < 80; ++k) {
    CHECK(DftMagnitude(x, 100.0 * k, 16000) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(DftMagnitude(x, 100.0 * k + 50.0, 16000) < 1e-9);
  }
}

TEST_CASE("Resonator cascade of silence is silent") {
  const Vec y = ResonatorCascade(Vec(500, 0.0), VowelSpec{}, 16000);
  CHECK(y == Vec(500, 0.0));
}

TEST_CASE("Single resonator peaks at the pole frequency") {
  Vec impulse(16000, 0.0);
  impulse[0] = 1.0;
  const Vec h = Resonator(impulse, 500.0, 80.0, 16000);
  double best_hz = 0.0;
  double best = -1.0;
  for (int hz = 400; hz <= 600; ++hz) {
    const double m = DftMagnitude(h, hz, 16000);
    if (m > best) {
      best = m;
      best_hz = hz;
    }
  }
  // Peak of 1 / |1 - 2r cos(t) e^-jw + r^2 e^-2jw|.
  const double r = std::exp(-std::numbers::pi * 80.0 / 16000);
  const double theta = 2.0 * std::numbers::pi * 500.0 / 16000;
  const double peak =
      std::acos((1.0 + r * r) / (2.0 * r) * std::cos(theta)) * 16000 / (2.0 * std::numbers::pi);
  CHECK(std::abs(best_hz - peak) <= 1.0);
  CHECK(std::abs(best_hz - 500.0) <= 5.0);
}

TEST_CASE("Synthesized vowel is stable and normalized") {
  Rng rng(1);
  VowelSpec spec;
  spec.f0 = 400.0;
  spec.formants = {300, 500, 700, 900};
  spec.bandwidths = {20, 20, 20, 20};
  const Vec y = SynthesizeVowel(spec, 16000, rng);
  double peak = 0.0;
  for (double v : y) {
    REQUIRE(std::isfinite(v));
    peak = std::max(peak, std::abs(v));
  }
  CHECK(peak == doctest::Approx(1.0));
  CHECK(y.size() == 4800);
}

TEST_CASE("Noise is added at the requested SNR") {
  VowelSpec spec;
  spec.noise_snr_db = 10.0;
  Rng a(3);
  Rng b(3);
  const Vec x = SynthesizeVowel(spec, 16000, a);
  CHECK(x == SynthesizeVowel(spec, 16000, b));
  Rng c(4);
  CHECK(x != SynthesizeVowel(spec, 16000, c));
}

TEST_CASE("LPC-root baseline recovers a synthesized vowel") {
  Rng rng(1);
  VowelSpec spec;
  spec.f0 = 120.0;
  spec.formants = {700, 1200, 2600, 3500};
  spec.bandwidths = {80, 90, 120, 150};
  const Segment seg = Preprocess(SynthesizeVowel(spec, 16000, rng), 16000);
  const Estimate e = LpcRootBaseline(seg);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(e.present[i]);
    CHECK(std::abs(e.hz[i] - spec.formants[i]) <= 30.0);
  }
}

TEST_CASE("Vowel spec validation") {
  VowelSpec spec;
  CHECK_NOTHROW(ValidateVowelSpec(spec));
  spec.f0 = 59.0;
  CHECK_THROWS_AS(ValidateVowelSpec(spec), std::invalid_argument);
  spec = VowelSpec{};
  spec.formants = {500, 400, 2500, 3500};
  CHECK_THROWS_AS(ValidateVowelSpec(spec), std::invalid_argument);
  spec = VowelSpec{};
  spec.formants[3] = 7600.0;
  CHECK_THROWS_AS(ValidateVowelSpec(spec), std::invalid_argument);
  spec = VowelSpec{};
  spec.bandwidths[0] = 19.0;
  CHECK_THROWS_AS(ValidateVowelSpec(spec), std::invalid_argument);
}

TEST_CASE("Sampling a degenerate domain") {
  DomainSpec d = AdultMaleDomain();
  d.f0 = {100, 100};
  d.formants = {Range{500, 500}, Range{1500, 1500}, Range{2500, 2500}, Range{3500, 3500}};
  d.bandwidths = {Range{80, 80}, Range{90, 90}, Range{120, 120}, Range{150, 150}};
  Rng rng(9);
  const VowelSpec s = SampleDomain(d, rng);
  CHECK(s.f0 == 100.0);
  CHECK(s.formants == Formants{500, 1500, 2500, 3500});
  CHECK(s.bandwidths == Formants{80, 90, 120, 150});

  d.formants[1] = Range{550, 550};
  CHECK_THROWS_AS(SampleDomain(d, rng), std::invalid_argument);
}

TEST_CASE("Sampling is seeded and stays in range") {
  const DomainSpec d = AdultMaleDomain();
  Rng a(5);
  Rng b(5);
  const VowelSpec sa = SampleDomain(d, a);
  const VowelSpec sb = SampleDomain(d, b);
  CHECK(sa.formants == sb.formants);
  CHECK(sa.f0 == sb.f0);

  Rng rng(6);
  double lo = 1e9;
  double hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const VowelSpec s = SampleDomain(d, rng);
    lo = std::min(lo, s.formants[0]);
    hi = std::max(hi, s.formants[0]);
    for (int k = 1; k < 4; ++k) REQUIRE(s.formants[k] - s.formants[k - 1] >= kMinFormantSeparation);
    REQUIRE(s.f0 >= 80.0);
    REQUIRE(s.f0 <= 160.0);
  }
  CHECK(lo >= 260.0);
  CHECK(hi <= 860.0);
  CHECK(lo < 280.0);
  CHECK(hi > 840.0);
}

TEST_CASE("Built-in domains") {
  const DomainSpec a = AdultMaleDomain();
  CHECK(a.name == "adult_male");
  CHECK(a.f0.lo == 80.0);
  CHECK(a.f0.hi == 160.0);
  CHECK(a.formants[0].lo == 260.0);
  CHECK(a.formants[3].hi == 4200.0);
  const DomainSpec c = ChildDomain();
  CHECK(c.name == "child");
  CHECK(c.f0.lo == 200.0);
  CHECK(c.formants[1].hi == 3200.0);
  CHECK(c.formants[3].hi == 5500.0);
  CHECK(BuiltinDomain("child").has_value());
  CHECK_FALSE(BuiltinDomain("alien").has_value());
}

TEST_CASE("Domain JSON") {
  const DomainSpec d = ParseDomainJson(R"({"name": "small", "f0": [90, 110],
      "formants": [[300, 400], [900, 1200], [2000, 2500], [3000, 3500]],
      "bandwidths": [[50, 60], [60, 70], [70, 80], [80, 90]], "noise_snr_db": 30})");
  CHECK(d.name == "small");
  CHECK(d.formants[2].hi == 2500.0);
  CHECK(d.noise_snr_db == 30.0);
  CHECK(d.duration_s == 0.3);
  CHECK_THROWS_AS(ParseDomainJson("{"), DataError);
  CHECK_THROWS_AS(ParseDomainJson(R"({"name": "x"})"), DataError);
}

TEST_CASE("Corpus generation") {
  testing_util::TempDir dir;
  const Manifest m = GenerateCorpus(AdultMaleDomain(), 1, 7, dir.path() / "one");
  REQUIRE(m.entries.size() == 1);
  const ManifestEntry& e = m.entries[0];
  CHECK(e.domain == "adult_male");
  CHECK(e.mask == kAllFormants);
  CHECK(std::filesystem::exists(dir.path() / "one" / e.path));
  const Manifest loaded = LoadManifest(dir.path() / "one" / "manifest.csv");
  CHECK(loaded.entries == m.entries);
  const WavData w = ReadWav(dir.path() / "one" / e.path);
  CHECK(w.sample_rate == 16000);
  CHECK(static_cast<double>(w.samples.size()) / 16000 == doctest::Approx(e.end_s));

  const Manifest again = GenerateCorpus(AdultMaleDomain(), 1, 7, dir.path() / "two");
  CHECK(again.entries == m.entries);
  CHECK(ReadFileBytes(dir.path() / "one" / e.path) == ReadFileBytes(dir.path() / "two" / e.path));
}

TEST_CASE("Child corpus has higher formants") {
  testing_util::TempDir dir;
  const Manifest a = GenerateCorpus(AdultMaleDomain(), 500, 1, dir.path() / "a");
  const Manifest c = GenerateCorpus(ChildDomain(), 500, 1, dir.path() / "c");
  double ma = 0.0;
  double mc = 0.0;
  for (const auto& e : a.entries) ma += e.formants[0] / 500;
  for (const auto& e : c.entries) mc += e.formants[0] / 500;
  CHECK(mc > ma);
}

}  // namespace
}  // namespace formant_da
