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
#include "formant_da/signal.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace formant_da {

namespace {

constexpr double kPi = std::numbers::pi;

// Zero crossings of the sinc kernel on each side of the resampler taps.
constexpr int kResampleZeroCrossings = 16;

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

bool IsSupportedRate(int rate) {
  switch (rate) {
    case 8000:
    case 11025:
    case 16000:
    case 22050:
    case 44100:
    case 48000:
      return true;
    default:
      return false;
  }
}

}  // namespace

bool FormantsConsistent(const Formants& f, const FormantMask& mask) {
  double prev = 0.0;
  for (int i = 0; i < kNumFormants; ++i) {
    if (!mask[i]) continue;
    if (!std::isfinite(f[i]) || f[i] <= prev) return false;
    prev = f[i];
  }
  return true;
}

void ValidateSegment(const Segment& seg) {
  if (seg.samples.empty()) {
    throw std::invalid_argument("segment has no samples");
  }
  if (seg.sample_rate <= 0) {
    throw std::invalid_argument("segment sample rate must be positive");
  }
  if (!FormantsConsistent(seg.targets, seg.mask)) {
    throw std::invalid_argument(
        "segment targets must be positive and strictly increasing");
  }
}

Vec Resample(std::span<const double> x, int rate_in, int rate_out) {
  if (rate_in <= 0 || rate_out <= 0) {
    throw std::invalid_argument("resample rates must be positive");
  }
  if (rate_in == rate_out) return Vec(x.begin(), x.end());
  const int g = std::gcd(rate_in, rate_out);
  const long up = rate_out / g;
  const long down = rate_in / g;
  const long n_in = static_cast<long>(x.size());
  const long n_out = (n_in * up + down - 1) / down;

  // Cutoff relative to the input Nyquist frequency.
  const double cutoff = std::min(1.0, static_cast<double>(rate_out) / rate_in);
  const int half = static_cast<int>(std::ceil(kResampleZeroCrossings / cutoff));
  const int taps = 2 * half;

  // One filter per output phase; tap j multiplies x[base - half + 1 + j].
  std::vector<Vec> bank(up, Vec(taps));
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    for (int j = 0; j < taps; ++j) {
      const double tau = frac - (j - half + 1);
      const double u = tau / half;
      double w = 0.0;
      if (std::abs(u) < 1.0) {
        // Blackman window over [-half, half].
        const double phase = kPi * (u + 1.0);
        w = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
      }
      bank[p][j] = cutoff * Sinc(cutoff * tau) * w;
    }
  }

  Vec y(n_out, 0.0);
  for (long n = 0; n < n_out; ++n) {
    const long pos = n * down;
    const long base = pos / up;
    const Vec& h = bank[pos % up];
    double acc = 0.0;
    for (int j = 0; j < taps; ++j) {
      const long k = base - half + 1 + j;
      if (k < 0 || k >= n_in) continue;
      acc += x[k] * h[j];
    }
    y[n] = acc;
  }
  return y;
}

Segment Preprocess(std::span<const double> raw, int rate) {
  if (raw.empty()) throw DataError("cannot preprocess an empty signal");
  if (!IsSupportedRate(rate)) {
    throw DataError("unsupported sample rate " + std::to_string(rate));
  }
  Segment seg;
  seg.sample_rate = kAnalysisRate;
  seg.samples = Resample(raw, rate, kAnalysisRate);

  const double mean =
      std::accumulate(seg.samples.begin(), seg.samples.end(), 0.0) /
      static_cast<double>(seg.samples.size());
  double peak = 0.0;
  for (double& v : seg.samples) {
    v -= mean;
    peak = std::max(peak, std::abs(v));
  }
  // Residual DC round-off below this level is treated as silence.
  if (peak > 1e-12) {
    for (double& v : seg.samples) v /= peak;
  } else {
    std::fill(seg.samples.begin(), seg.samples.end(), 0.0);
  }
  return seg;
}

Vec Autocorrelation(std::span<const double> frame, int max_lag) {
  if (max_lag < 0 || static_cast<size_t>(max_lag) >= frame.size()) {
    throw std::invalid_argument("max_lag must be smaller than the frame");
  }
  const size_t n = frame.size();
  Vec r(max_lag + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (size_t i = 0; i + k < n; ++i) acc += frame[i] * frame[i + k];
    r[k] = acc;
  }
  return r;
}

LpcModel LevinsonDurbin(std::span<const double> r, int p) {
  if (p < 1 || static_cast<size_t>(p) + 1 > r.size()) {
    throw std::invalid_argument("LPC order must satisfy 1 <= p <= len(r)-1");
  }
  if (!(r[0] > 0.0)) throw NumericError("silent frame: r[0] <= 0");

  Vec a(p, 0.0);
  Vec prev(p, 0.0);
  double err = r[0];
  for (int i = 1; i <= p; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += a[j - 1] * r[i - j];
    const double k = -acc / err;
    if (!std::isfinite(k) || std::abs(k) >= 1.0 + 1e-9) {
      throw NumericError("unstable Levinson-Durbin recursion at order " +
                         std::to_string(i));
    }
    std::copy(a.begin(), a.begin() + i - 1, prev.begin());
    for (int j = 1; j < i; ++j) a[j - 1] = prev[j - 1] + k * prev[i - j - 1];
    a[i - 1] = k;
    err = std::max(0.0, err * (1.0 - k * k));
  }
  return LpcModel{p, std::move(a), err};
}

Vec LpcToCepstrum(const LpcModel& model, int n) {
  if (n < 1) throw std::invalid_argument("cepstrum length must be >= 1");
  const int p = model.order;
  const Vec& a = model.coefficients;
  if (static_cast<int>(a.size()) != p) {
    throw std::invalid_argument("LPC coefficient count differs from order");
  }
  // c[m] holds c_m; index 0 unused.
  Vec c(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (int k = std::max(1, m - p); k < m; ++k) {
      acc += k * c[k] * a[m - k - 1];
    }
    c[m] = -acc / m;
    if (m <= p) c[m] -= a[m - 1];
  }
  return Vec(c.begin() + 1, c.end());
}

Vec PreEmphasize(std::span<const double> x, double coeff) {
  Vec y(x.begin(), x.end());
  for (size_t i = x.size(); i-- > 1;) y[i] = x[i] - coeff * x[i - 1];
  return y;
}

Vec HammingWindowed(std::span<const double> x) {
  const size_t n = x.size();
  Vec y(x.begin(), x.end());
  if (n < 2) return y;
  for (size_t i = 0; i < n; ++i) {
    y[i] *= 0.54 - 0.46 * std::cos(2.0 * kPi * i / static_cast<double>(n - 1));
  }
  return y;
}

Vec LpcAnalysisAutocorrelation(const Segment& seg, int max_lag) {
  ValidateSegment(seg);
  if (seg.samples.size() <= static_cast<size_t>(max_lag)) {
    throw DataError("segment too short for LPC analysis");
  }
  return Autocorrelation(HammingWindowed(PreEmphasize(seg.samples)), max_lag);
}

int EstimateMedianPitch(const Segment& seg) {
  ValidateSegment(seg);
  const int rate = seg.sample_rate;
  const int frame_len = static_cast<int>(std::lround(0.030 * rate));
  const int hop = static_cast<int>(std::lround(0.010 * rate));
  const int min_lag = static_cast<int>(std::lround(rate / 400.0));
  const int max_lag =
      std::min(static_cast<int>(std::lround(rate / 60.0)), frame_len - 1);
  const int n = static_cast<int>(seg.samples.size());
  if (n < frame_len) throw DataError("segment shorter than one pitch frame");

  std::vector<int> periods;
  for (int start = 0; start + frame_len <= n; start += hop) {
    std::span<const double> frame(seg.samples.data() + start, frame_len);
    const Vec r = Autocorrelation(frame, max_lag);
    if (!(r[0] > 0.0)) continue;
    int best_lag = min_lag;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = min_lag; k <= max_lag; ++k) {
      const double v = r[k] / r[0];
      if (v > best) {
        best = v;
        best_lag = k;
      }
    }
    if (best >= kVoicingThreshold) periods.push_back(best_lag);
  }
  if (periods.empty()) return kPitchFallbackPeriod;

  std::sort(periods.begin(), periods.end());
  const size_t m = periods.size();
  if (m % 2 == 1) return periods[m / 2];
  return static_cast<int>(
      std::lround(0.5 * (periods[m / 2 - 1] + periods[m / 2])));
}

LogSpectrum PitchSyncSpectrum(const Segment& seg, int period) {
  ValidateSegment(seg);
  if (period < 16 || period > kSpectrumFftSize) {
    throw std::invalid_argument("pitch period must lie in [16, 512] samples");
  }
  const size_t n_frames = seg.samples.size() / static_cast<size_t>(period);
  if (n_frames == 0) throw DataError("segment shorter than one pitch period");

  Vec avg(kSpectrumBins, 0.0);
  std::vector<std::complex<double>> buf(kSpectrumFftSize);
  for (size_t f = 0; f < n_frames; ++f) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    const double* src = seg.samples.data() + f * period;
    for (int i = 0; i < period; ++i) buf[i] = src[i];
    Fft(buf);
    for (int b = 0; b < kSpectrumBins; ++b) avg[b] += std::abs(buf[b]);
  }
  LogSpectrum out;
  out.values.resize(kSpectrumBins);
  for (int b = 0; b < kSpectrumBins; ++b) {
    out.values[b] =
        std::log(std::max(avg[b] / static_cast<double>(n_frames), kSpectrumFloor));
  }
  return out;
}

namespace {

// cos(pi * m / (2N)) for m in [0, 4N).
Vec QuarterCosTable(int n) {
  Vec t(4 * static_cast<size_t>(n));
  for (size_t m = 0; m < t.size(); ++m) {
    t[m] = std::cos(kPi * static_cast<double>(m) / (2.0 * n));
  }
  return t;
}

}  // namespace

Vec DctII(std::span<const double> x, int n_out) {
  const int n = static_cast<int>(x.size());
  if (n_out < 0 || n_out > n) {
    throw std::invalid_argument("DCT output length exceeds input length");
  }
  if (n_out == 0) return {};
  const Vec table = QuarterCosTable(n);
  const size_t period = table.size();
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  Vec out(n_out);
  for (int k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += x[i] * table[(static_cast<size_t>(2 * i + 1) * k) % period];
    }
    out[k] = (k == 0 ? s0 : sk) * acc;
  }
  return out;
}

Vec InverseDctII(std::span<const double> coeffs) {
  const int n = static_cast<int>(coeffs.size());
  if (n == 0) return {};
  const Vec table = QuarterCosTable(n);
  const size_t period = table.size();
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double acc = s0 * coeffs[0];
    for (int k = 1; k < n; ++k) {
      acc += sk * coeffs[k] * table[(static_cast<size_t>(2 * i + 1) * k) % period];
    }
    out[i] = acc;
  }
  return out;
}

void Fft(std::span<std::complex<double>> data) {
  const size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("FFT size must be a power of two");
  }
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    for (size_t k = 0; k < half; ++k) {
      const double angle = -2.0 * kPi * static_cast<double>(k) / len;
      const std::complex<double> w(std::cos(angle), std::sin(angle));
      for (size_t start = 0; start < n; start += len) {
        const std::complex<double> u = data[start + k];
        const std::complex<double> v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

}  // namespace formant_da
