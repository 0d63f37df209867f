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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "formant_da/wav.h"

namespace formant_da {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxRejections = 1000;

void CheckRange(const Range& r, const char* what) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string("empty or invalid range for ") + what);
  }
}

void PeakNormalize(Vec& x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : x) v /= peak;
  }
}

double RoundCentiHz(double hz) { return std::round(hz * 100.0) / 100.0; }

Range ParseRange(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) {
    throw DataError(std::string("domain field '") + what + "' must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void ValidateVowelSpec(const VowelSpec& spec) {
  if (!(spec.f0 >= 60.0 && spec.f0 <= 400.0)) {
    throw std::invalid_argument("f0 must lie in [60, 400] Hz");
  }
  double prev = 0.0;
  for (int i = 0; i < kNumFormants; ++i) {
    const double f = spec.formants[i];
    if (!(f > prev && f < 7600.0)) {
      throw std::invalid_argument(
          "formants must be strictly increasing and inside (0, 7600) Hz");
    }
    prev = f;
    const double b = spec.bandwidths[i];
    if (!(b >= 20.0 && b <= 500.0)) {
      throw std::invalid_argument("bandwidths must lie in [20, 500] Hz");
    }
  }
  if (!(spec.duration_s > 0.0) || !std::isfinite(spec.duration_s)) {
    throw std::invalid_argument("duration must be positive");
  }
  if (spec.noise_snr_db && !std::isfinite(*spec.noise_snr_db)) {
    throw std::invalid_argument("noise SNR must be finite");
  }
}

void ValidateDomainSpec(const DomainSpec& d) {
  if (d.name.empty()) throw std::invalid_argument("domain needs a name");
  CheckRange(d.f0, "f0");
  if (d.f0.lo < 60.0 || d.f0.hi > 400.0) {
    throw std::invalid_argument("f0 range must lie in [60, 400] Hz");
  }
  for (int i = 0; i < kNumFormants; ++i) {
    CheckRange(d.formants[i], "formant");
    CheckRange(d.bandwidths[i], "bandwidth");
    if (d.formants[i].lo <= 0.0 || d.formants[i].hi >= 7600.0) {
      throw std::invalid_argument("formant ranges must lie inside (0, 7600) Hz");
    }
    if (d.bandwidths[i].lo < 20.0 || d.bandwidths[i].hi > 500.0) {
      throw std::invalid_argument("bandwidth ranges must lie in [20, 500] Hz");
    }
    if (i > 0 && d.formants[i].hi <= d.formants[i - 1].lo) {
      throw std::invalid_argument("formant ranges do not permit strict ordering");
    }
  }
  if (!(d.duration_s > 0.0)) throw std::invalid_argument("duration must be positive");
}

DomainSpec AdultMaleDomain() {
  DomainSpec d;
  d.name = "adult_male";
  d.f0 = {80.0, 160.0};
  d.formants = {{{260.0, 860.0}, {850.0, 2300.0}, {1900.0, 3200.0}, {3200.0, 4200.0}}};
  d.bandwidths = {{{50.0, 120.0}, {60.0, 150.0}, {80.0, 200.0}, {100.0, 250.0}}};
  return d;
}

DomainSpec ChildDomain() {
  DomainSpec d;
  d.name = "child";
  d.f0 = {200.0, 400.0};
  d.formants = {{{380.0, 1200.0}, {1200.0, 3200.0}, {2800.0, 4300.0}, {4000.0, 5500.0}}};
  d.bandwidths = {{{70.0, 160.0}, {80.0, 200.0}, {100.0, 250.0}, {120.0, 300.0}}};
  return d;
}

std::optional<DomainSpec> BuiltinDomain(std::string_view name) {
  if (name == "adult_male") return AdultMaleDomain();
  if (name == "child") return ChildDomain();
  return std::nullopt;
}

DomainSpec ParseDomainJson(std::string_view text) {
  DomainSpec d;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    d.name = j.at("name").get<std::string>();
    d.f0 = ParseRange(j.at("f0"), "f0");
    const auto& f = j.at("formants");
    const auto& b = j.at("bandwidths");
    if (!f.is_array() || f.size() != kNumFormants || !b.is_array() ||
        b.size() != kNumFormants) {
      throw DataError("domain needs 4 formant and 4 bandwidth ranges");
    }
    for (int i = 0; i < kNumFormants; ++i) {
      d.formants[i] = ParseRange(f[i], "formants");
      d.bandwidths[i] = ParseRange(b[i], "bandwidths");
    }
    if (j.contains("duration_s")) d.duration_s = j["duration_s"].get<double>();
    if (j.contains("noise_snr_db") && !j["noise_snr_db"].is_null()) {
      d.noise_snr_db = j["noise_snr_db"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad domain JSON: ") + e.what());
  }
  try {
    ValidateDomainSpec(d);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("bad domain JSON: ") + e.what());
  }
  return d;
}

Vec MakeSource(double f0, double duration_s, int rate) {
  if (!(f0 > 0.0) || rate <= 0) {
    throw std::invalid_argument("f0 and rate must be positive");
  }
  const long n = std::lround(duration_s * rate);
  if (!(duration_s > 0.0) || n <= 0) {
    throw std::invalid_argument("source duration yields no samples");
  }
  const long period = std::max(1L, std::lround(rate / f0));
  Vec x(n, 0.0);
  for (long i = 0; i < n; i += period) x[i] = 1.0;
  return x;
}

Vec Resonator(std::span<const double> x, double freq_hz, double bandwidth_hz,
              int rate) {
  const double r = std::exp(-kPi * bandwidth_hz / rate);
  const double theta = 2.0 * kPi * freq_hz / rate;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  Vec y(x.size());
  double y1 = 0.0;
  double y2 = 0.0;
  for (size_t n = 0; n < x.size(); ++n) {
    const double out = x[n] + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = out;
    y[n] = out;
  }
  return y;
}

Vec ResonatorCascade(std::span<const double> source, const VowelSpec& spec,
                     int rate) {
  ValidateVowelSpec(spec);
  Vec y(source.begin(), source.end());
  for (int k = 0; k < kNumFormants; ++k) {
    y = Resonator(y, spec.formants[k], spec.bandwidths[k], rate);
  }
  PeakNormalize(y);
  return y;
}

Vec GlottalTilt(std::span<const double> x) {
  Vec y(x.begin(), x.end());
  for (size_t i = 1; i < y.size(); ++i) y[i] += kGlottalTiltPole * y[i - 1];
  return y;
}

Vec SynthesizeVowel(const VowelSpec& spec, int rate, Rng& rng) {
  ValidateVowelSpec(spec);
  Vec y = ResonatorCascade(GlottalTilt(MakeSource(spec.f0, spec.duration_s, rate)),
                           spec, rate);
  if (spec.noise_snr_db) {
    double power = 0.0;
    for (double v : y) power += v * v;
    power /= static_cast<double>(y.size());
    const double sigma = std::sqrt(power / std::pow(10.0, *spec.noise_snr_db / 10.0));
    for (double& v : y) v += sigma * rng.Gaussian();
    PeakNormalize(y);
  }
  return y;
}

VowelSpec SampleDomain(const DomainSpec& d, Rng& rng, double min_separation_hz) {
  ValidateDomainSpec(d);
  VowelSpec spec;
  spec.duration_s = d.duration_s;
  spec.noise_snr_db = d.noise_snr_db;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    spec.f0 = rng.Uniform(d.f0.lo, d.f0.hi);
    for (int i = 0; i < kNumFormants; ++i) {
      spec.formants[i] = rng.Uniform(d.formants[i].lo, d.formants[i].hi);
      spec.bandwidths[i] = rng.Uniform(d.bandwidths[i].lo, d.bandwidths[i].hi);
    }
    bool ok = true;
    for (int i = 1; i < kNumFormants; ++i) {
      if (spec.formants[i] - spec.formants[i - 1] < min_separation_hz) ok = false;
    }
    if (ok) return spec;
  }
  throw std::invalid_argument("domain '" + d.name +
                              "': no valid vowel after 1000 draws");
}

Manifest GenerateCorpus(const DomainSpec& d, int n, std::uint64_t seed,
                        const std::filesystem::path& out_dir) {
  if (n < 1) throw std::invalid_argument("corpus size must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw DataError("cannot create '" + out_dir.string() + "': " + ec.message());
  }
  Rng rng(seed);
  Manifest m;
  m.name = d.name;
  m.base_dir = out_dir;
  char name[64];
  for (int i = 0; i < n; ++i) {
    VowelSpec spec = SampleDomain(d, rng);
    for (double& f : spec.formants) f = RoundCentiHz(f);
    const Vec audio = SynthesizeVowel(spec, kAnalysisRate, rng);
    std::snprintf(name, sizeof(name), "%s_%05d.wav", d.name.c_str(), i);
    WriteWav(out_dir / name, audio, kAnalysisRate);
    ManifestEntry e;
    e.path = name;
    e.start_s = 0.0;
    e.end_s = static_cast<double>(audio.size()) / kAnalysisRate;
    e.formants = spec.formants;
    e.mask = kAllFormants;
    e.domain = d.name;
    m.entries.push_back(std::move(e));
  }
  SaveManifest(m, out_dir / "manifest.csv");
  return m;
}

}  // namespace formant_da
