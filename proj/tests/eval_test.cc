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
#include "formant_da/eval.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "formant_da/synth.h"

namespace formant_da {
namespace {

ExampleSet Examples(const std::vector<Formants>& targets, const std::vector<std::string>& domains,
                    FormantMask mask = kAllFormants) {
  ExampleSet ex;
  for (size_t i = 0; i < targets.size(); ++i) {
    ex.features.push_back(FeatureVector{Vec(kFeatureDim, 0.0)});
    ex.targets.push_back(targets[i]);
    ex.masks.push_back(mask);
    ex.domains.push_back(domains[i]);
  }
  return ex;
}

std::vector<Estimate> Exact(const ExampleSet& ex, Formants shift = {0, 0, 0, 0}) {
  std::vector<Estimate> out;
  for (const Formants& t : ex.targets) {
    Estimate e;
    for (int i = 0; i < 4; ++i) e.hz[i] = t[i] + shift[i];
    out.push_back(e);
  }
  return out;
}

TEST_CASE("MAE closed forms") {
  const ExampleSet ex = Examples({{500, 1500, 2500, 3500}, {600, 1700, 2600, 3600}, {300, 900, 2200, 3300}},
                                 {"a", "b", "a"});
  const EvalReport zero = MaeReport("m", Exact(ex), ex);
  REQUIRE(zero.domains.size() == 2);
  CHECK(zero.domains[0].domain == "a");
  CHECK(zero.domains[0].mae_hz == Formants{0, 0, 0, 0});
  CHECK(zero.domains[0].segments == 2);

  const EvalReport shifted = MaeReport("m", Exact(ex, {10, -4, 0, 0}), ex);
  for (const DomainErrors& d : shifted.domains) {
    CHECK(d.mae_hz[0] == doctest::Approx(10.0));
    CHECK(d.mae_hz[1] == doctest::Approx(4.0));
  }
  CHECK(shifted.find("b")->counts[0] == 1);
  CHECK(shifted.find("zzz") == nullptr);
}

TEST_CASE("MAE respects masks and absent estimates") {
  ExampleSet ex = Examples({{500, 1500, 2500, 3500}, {600, 1700, 2600, 3600}}, {"c", "c"},
                           {true, true, false, false});
  std::vector<Estimate> est = Exact(ex, {20, 20, 999, 999});
  est[1].present[1] = false;
  const EvalReport r = MaeReport("m", est, ex, {true, true, false, false});
  const DomainErrors& d = r.domains[0];
  CHECK(d.mae_hz[0] == doctest::Approx(20.0));
  CHECK(d.counts[1] == 1);
  CHECK(d.missing[1] == 1);
  CHECK(d.counts[2] == 0);
  CHECK_THROWS_AS(MaeReport("m", est, ex), DataError);
}

TEST_CASE("MAE is invariant to segment order") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 50.0);
  std::vector<Formants> targets;
  std::vector<std::string> domains;
  for (int i = 0; i < 200; ++i) {
    targets.push_back({400.0 + i, 1400.0 + i, 2400.0 + i, 3400.0 + i});
    domains.push_back(i % 3 ? "x" : "y");
  }
  const ExampleSet ex = Examples(targets, domains);
  std::vector<Estimate> est = Exact(ex);
  for (auto& e : est) {
    for (double& v : e.hz) v += normal(gen);
  }
  std::vector<size_t> order(ex.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), gen);
  ExampleSet ex2;
  std::vector<Estimate> est2;
  for (size_t i : order) {
    ex2.features.push_back(ex.features[i]);
    ex2.targets.push_back(ex.targets[i]);
    ex2.masks.push_back(ex.masks[i]);
    ex2.domains.push_back(ex.domains[i]);
    est2.push_back(est[i]);
  }
  const auto a = MaeReport("m", est, ex, kAllFormants);
  const auto b = MaeReport("m", est2, ex2, kAllFormants);
  for (size_t d = 0; d < a.domains.size(); ++d) CHECK(a.domains[d].mae_hz == b.domains[d].mae_hz);
}

TEST_CASE("Report CSV and table") {
  const ExampleSet ex = Examples({{500, 1500, 2500, 3500}}, {"vtr"}, {true, true, false, false});
  const EvalReport r = MaeReport("domain_adaptation", Exact(ex, {50, 86, 0, 0}), ex,
                                 {true, true, false, false});
  const EvalReport reports[] = {r};
  const std::string csv = ReportCsv(reports);
  CHECK(csv ==
        "method,domain,segments,f1_mae_hz,f1_n,f2_mae_hz,f2_n,f3_mae_hz,f3_n,"
        "f4_mae_hz_not_evaluated,f4_n\n"
        "domain_adaptation,vtr,1,50.00,1,86.00,1,,0,,0\n");
  const std::string table = ReportTable(reports);
  CHECK(table.find("vtr") != std::string::npos);
  CHECK(table.find("50.00") != std::string::npos);
  CHECK(table.find("--") != std::string::npos);
}

TEST_CASE("Gate histograms") {
  const Vec gates = {0.0, 0.05, 0.1, 0.55, 0.999, 1.0};
  const GateHistogram h = HistogramOf("d", gates);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 1);
  CHECK(h.counts[5] == 1);
  CHECK(h.counts[9] == 2);
  CHECK(h.total() == 6);
  CHECK(h.occupied_buckets() == 4);
  CHECK(h.top3_adjacent_share() == doctest::Approx(0.5));

  const GateHistogram one = HistogramOf("d", Vec{0.42});
  CHECK(one.total() == 1);
  CHECK(one.counts[4] == 1);
  CHECK(one.occupied_buckets() == 1);

  const GateHistogram hists[] = {one};
  const std::string csv = HistogramCsv(hists);
  CHECK(csv.rfind("domain,bucket_lo,bucket_hi,count\n", 0) == 0);
  CHECK(csv.find("d,0.4,0.5,1\n") != std::string::npos);
}

TEST_CASE("Identity adapter puts every gate in the middle bucket") {
  DaModel m;
  m.core.net = MlpInit(CoreArchitecture(), 1);
  m.core.normalizer.feature_mean = Vec(kFeatureDim, 0.0);
  m.core.normalizer.feature_std = Vec(kFeatureDim, 1.0);
  m.adapter = IdentityInit();
  const ExampleSet ex = Examples({{500, 1500, 2500, 3500}, {600, 1600, 2600, 3600}}, {"a", "b"});
  const auto hists = SHistogram(m, ex);
  REQUIRE(hists.size() == 2);
  for (const GateHistogram& h : hists) {
    CHECK(h.counts[5] == 1);
    CHECK(h.total() == 1);
  }
}

Segment Synth(const VowelSpec& spec) {
  Rng rng(1);
  return Preprocess(SynthesizeVowel(spec, kAnalysisRate, rng), kAnalysisRate);
}

TEST_CASE("LPC-root baseline on a clean vowel") {
  VowelSpec spec;
  spec.f0 = 110.0;
  spec.formants = {700, 1200, 2600, 3500};
  spec.bandwidths = {80, 90, 120, 150};
  const Estimate e = LpcRootBaseline(Synth(spec));
  CHECK_FALSE(e.present[3]);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(e.present[i]);
    CHECK(std::abs(e.hz[i] - spec.formants[i]) <= 30.0);
  }
  CHECK(e.hz[0] < e.hz[1]);
  CHECK(e.hz[1] < e.hz[2]);
}

TEST_CASE("LPC-root baseline on noise and a tone") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  Vec noise(4800);
  for (double& v : noise) v = normal(gen);
  const Estimate e = LpcRootBaseline(Preprocess(noise, 16000));
  for (int i = 1; i < 3; ++i) {
    if (e.present[i] && e.present[i - 1]) CHECK(e.hz[i] > e.hz[i - 1]);
  }

  Vec tone(4800);
  for (size_t n = 0; n < tone.size(); ++n) tone[n] = std::sin(2.0 * std::numbers::pi * 1000.0 * n / 16000);
  const Vec cands = LpcRootCandidates(Preprocess(tone, 16000));
  REQUIRE_FALSE(cands.empty());
  const double nearest = *std::min_element(cands.begin(), cands.end(), [](double a, double b) {
    return std::abs(a - 1000.0) < std::abs(b - 1000.0);
  });
  CHECK(std::abs(nearest - 1000.0) < 20.0);
  // A pure tone may split into a pair of nearly coincident poles at order 18,
  // but nothing else should appear.
  for (double c : cands) CHECK(std::abs(c - 1000.0) < 5.0);

  Segment silent;
  silent.samples = Vec(4800, 0.0);
  const Estimate s = LpcRootBaseline(silent);
  CHECK(s.present == FormantMask{false, false, false, false});
}

}  // namespace
}  // namespace formant_da
