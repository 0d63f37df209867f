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
// Source-filter vowel synthesis with exact formant ground truth.
//
// An impulse train at the fundamental, given a -6 dB/octave tilt, excites a
// cascade of four two-pole resonators. The specified pole frequencies are the ground truth; spectral
// peaks of a cascade shift slightly when poles are close, and evaluation
// tolerances absorb that.

#ifndef FORMANT_DA_SYNTH_H_
#define FORMANT_DA_SYNTH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "formant_da/common.h"
#include "formant_da/manifest.h"
#include "formant_da/random.h"

namespace formant_da {

struct VowelSpec {
  double f0 = 120.0;
  Formants formants = {500.0, 1500.0, 2500.0, 3500.0};
  Formants bandwidths = {80.0, 90.0, 120.0, 150.0};
  double duration_s = 0.3;
  std::optional<double> noise_snr_db;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct DomainSpec {
  std::string name;
  Range f0;
  std::array<Range, kNumFormants> formants;
  std::array<Range, kNumFormants> bandwidths;
  double duration_s = 0.3;
  std::optional<double> noise_snr_db;
};

inline constexpr double kMinFormantSeparation = 150.0;

void ValidateVowelSpec(const VowelSpec& spec);
void ValidateDomainSpec(const DomainSpec& d);

DomainSpec AdultMaleDomain();
DomainSpec ChildDomain();
// "adult_male" or "child"; nullopt otherwise.
std::optional<DomainSpec> BuiltinDomain(std::string_view name);

// {"name": ..., "f0": [lo, hi], "formants": [[lo, hi] x4],
//  "bandwidths": [[lo, hi] x4], "duration_s": 0.3, "noise_snr_db": 30}
// duration_s and noise_snr_db are optional.
DomainSpec ParseDomainJson(std::string_view text);

// Unit impulses every round(rate / f0) samples starting at index 0.
Vec MakeSource(double f0, double duration_s, int rate);

// One all-pole section 1 / (1 - 2r cos(theta) z^-1 + r^2 z^-2) with
// r = exp(-pi B / rate) and theta = 2 pi F / rate. Not normalized.
Vec Resonator(std::span<const double> x, double freq_hz, double bandwidth_hz,
              int rate);

// Four cascaded all-pole sections; output peak-normalized to 1.
Vec ResonatorCascade(std::span<const double> source, const VowelSpec& spec,
                     int rate);

// Pole of the one-pole lowpass that gives the source the -6 dB/octave net
// slope of a glottal pulse plus lip radiation.
inline constexpr double kGlottalTiltPole = 0.97;

// y_n = x_n + kGlottalTiltPole * y_{n-1}.
Vec GlottalTilt(std::span<const double> x);

// Tilted impulse source through the resonator cascade, plus white noise at
// spec.noise_snr_db when set; peak normalized. `rng` is only consumed when
// noise is requested.
Vec SynthesizeVowel(const VowelSpec& spec, int rate, Rng& rng);

// Uniform draws per range, resampled until formants are strictly ordered
// with at least `min_separation_hz` between neighbours. Throws
// std::invalid_argument after 1000 rejected draws.
VowelSpec SampleDomain(const DomainSpec& d, Rng& rng,
                       double min_separation_hz = kMinFormantSeparation);

// Writes `n` WAV files (16 kHz, 16-bit mono) and <out_dir>/manifest.csv.
// Formants are rounded to 0.01 Hz before synthesis so the manifest holds
// the exact ground truth.
Manifest GenerateCorpus(const DomainSpec& d, int n, std::uint64_t seed,
                        const std::filesystem::path& out_dir);

}  // namespace formant_da

#endif  // FORMANT_DA_SYNTH_H_
