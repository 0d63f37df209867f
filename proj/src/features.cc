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
#include "formant_da/features.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace formant_da {

namespace {

void CheckDim(const Normalizer& n, const FeatureVector& v) {
  if (v.values.size() != n.feature_mean.size() ||
      n.feature_std.size() != n.feature_mean.size()) {
    throw std::invalid_argument("feature vector and normalizer disagree in size");
  }
}

}  // namespace

Vec ExtractLpcFeatures(const Segment& seg) {
  const Vec r = LpcAnalysisAutocorrelation(seg, kMaxLpcOrder);
  Vec out;
  out.reserve(kLpcFeatureCount);
  for (int p = kMinLpcOrder; p <= kMaxLpcOrder; ++p) {
    const Vec c = LpcToCepstrum(LevinsonDurbin(r, p), kCepstraPerOrder);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

Vec ExtractSpectralFeatures(const Segment& seg) {
  const int period = EstimateMedianPitch(seg);
  const LogSpectrum spectrum = PitchSyncSpectrum(seg, period);
  return DctII(spectrum.values, kSpectralFeatureCount);
}

FeatureVector ExtractFeatures(const Segment& seg) {
  FeatureVector v;
  v.values = ExtractLpcFeatures(seg);
  const Vec spectral = ExtractSpectralFeatures(seg);
  v.values.insert(v.values.end(), spectral.begin(), spectral.end());
  for (double x : v.values) {
    if (!std::isfinite(x)) throw NumericError("non-finite feature value");
  }
  return v;
}

Normalizer FitNormalizer(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) {
    throw std::invalid_argument("cannot fit a normalizer on no vectors");
  }
  const size_t dim = vectors.front().values.size();
  const double count = static_cast<double>(vectors.size());
  Normalizer n;
  n.feature_mean.assign(dim, 0.0);
  n.feature_std.assign(dim, 0.0);
  for (const FeatureVector& v : vectors) {
    if (v.values.size() != dim) {
      throw std::invalid_argument("feature vectors differ in length");
    }
    for (size_t i = 0; i < dim; ++i) n.feature_mean[i] += v.values[i];
  }
  for (double& m : n.feature_mean) m /= count;
  for (const FeatureVector& v : vectors) {
    for (size_t i = 0; i < dim; ++i) {
      const double d = v.values[i] - n.feature_mean[i];
      n.feature_std[i] += d * d;
    }
  }
  for (double& s : n.feature_std) s = std::max(std::sqrt(s / count), kStdFloor);
  return n;
}

FeatureVector ApplyNormalizer(const Normalizer& n, const FeatureVector& v) {
  CheckDim(n, v);
  FeatureVector out{Vec(v.values.size())};
  for (size_t i = 0; i < v.values.size(); ++i) {
    out.values[i] = (v.values[i] - n.feature_mean[i]) / n.feature_std[i];
  }
  return out;
}

FeatureVector InvertNormalizer(const Normalizer& n, const FeatureVector& v) {
  CheckDim(n, v);
  FeatureVector out{Vec(v.values.size())};
  for (size_t i = 0; i < v.values.size(); ++i) {
    out.values[i] = v.values[i] * n.feature_std[i] + n.feature_mean[i];
  }
  return out;
}

}  // namespace formant_da
