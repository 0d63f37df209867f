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
// DSP primitives used by the feature front end: resampling and
// normalization, autocorrelation LPC, LPC cepstra, median pitch, the quasi
// pitch-synchronous log spectrum and an orthonormal DCT-II.
//
// Every function here is pure.

#ifndef FORMANT_DA_SIGNAL_H_
#define FORMANT_DA_SIGNAL_H_

#include <complex>
#include <optional>
#include <span>
#include <string>

#include "formant_da/common.h"

namespace formant_da {

// A mono span of audio that is analysed as one stationary unit.
struct Segment {
  Vec samples;
  int sample_rate = kAnalysisRate;
  std::optional<std::string> domain_label;
  Formants targets = {0.0, 0.0, 0.0, 0.0};
  FormantMask mask = {false, false, false, false};
};

// Throws std::invalid_argument when the Segment invariants do not hold.
void ValidateSegment(const Segment& seg);

// Predictor polynomial A(z) = 1 + sum_k a_k z^-k.
struct LpcModel {
  int order = 0;
  Vec coefficients;  // a_1..a_order
  double gain = 0.0;  // final prediction-error power
};

inline constexpr int kSpectrumFftSize = 512;
inline constexpr int kSpectrumBins = kSpectrumFftSize / 2 + 1;  // 257
inline constexpr double kSpectrumFloor = 1e-10;

// Natural-log magnitude spectrum on kSpectrumBins bins from 0 to Nyquist.
struct LogSpectrum {
  Vec values;
};

inline constexpr double kPreEmphasis = 0.97;
inline constexpr int kPitchFallbackPeriod = 160;
inline constexpr double kVoicingThreshold = 0.3;

// Resamples `raw` to 16 kHz, removes the mean and peak-normalizes.
// Supported input rates: 8000, 11025, 16000, 22050, 44100, 48000.
Segment Preprocess(std::span<const double> raw, int rate);

// Windowed-sinc polyphase resampler, rate_in -> rate_out. Output length is
// ceil(n * rate_out / rate_in) after reducing the ratio.
Vec Resample(std::span<const double> x, int rate_in, int rate_out);

// Biased, unnormalized autocorrelation r_0..r_max_lag.
Vec Autocorrelation(std::span<const double> frame, int max_lag);

// Solves the Yule-Walker equations for a predictor of order `p`.
// Throws NumericError if r_0 <= 0 or a reflection coefficient leaves the
// unit interval.
LpcModel LevinsonDurbin(std::span<const double> r, int p);

// Cepstral coefficients c_1..c_n of 1/A(z); c_0 is not returned.
Vec LpcToCepstrum(const LpcModel& model, int n = 30);

// First-order pre-emphasis y_n = x_n - coeff * x_{n-1}, with y_0 = x_0.
Vec PreEmphasize(std::span<const double> x, double coeff = kPreEmphasis);

// Returns a copy of `x` multiplied by a symmetric Hamming window.
Vec HammingWindowed(std::span<const double> x);

// Autocorrelation of the pre-emphasized, Hamming-windowed segment; the
// input shared by every LPC order the front end uses.
Vec LpcAnalysisAutocorrelation(const Segment& seg, int max_lag);

// Median pitch period in samples (30 ms frames, 10 ms hop, 60-400 Hz).
// Returns kPitchFallbackPeriod when no frame is voiced.
int EstimateMedianPitch(const Segment& seg);

// Averaged magnitude spectrum of consecutive period-length frames, each
// zero-padded to kSpectrumFftSize, in natural-log units.
LogSpectrum PitchSyncSpectrum(const Segment& seg, int period);

// Orthonormal DCT-II, coefficients 0..n_out-1.
Vec DctII(std::span<const double> x, int n_out);

// Inverse of the full-length orthonormal DCT-II (a DCT-III).
Vec InverseDctII(std::span<const double> coeffs);

// In-place iterative radix-2 FFT; size must be a power of two.
void Fft(std::span<std::complex<double>> data);

}  // namespace formant_da

#endif  // FORMANT_DA_SIGNAL_H_
