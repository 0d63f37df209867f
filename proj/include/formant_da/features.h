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
// The 350-value input vector: LPC cepstra for orders 8..17 followed by the
// leading DCT coefficients of the quasi pitch-synchronous log spectrum.

#ifndef FORMANT_DA_FEATURES_H_
#define FORMANT_DA_FEATURES_H_

#include <span>
#include <vector>

#include "formant_da/common.h"
#include "formant_da/signal.h"

namespace formant_da {

inline constexpr int kMinLpcOrder = 8;
inline constexpr int kMaxLpcOrder = 17;
inline constexpr int kCepstraPerOrder = 30;
inline constexpr int kLpcFeatureCount =
    (kMaxLpcOrder - kMinLpcOrder + 1) * kCepstraPerOrder;  // 300
inline constexpr int kSpectralFeatureCount = 50;
inline constexpr int kFeatureDim = kLpcFeatureCount + kSpectralFeatureCount;

// Layout is order-major: values[30 * (p - 8) + m - 1] is c_m of the order-p
// model; values[300 + k] is DCT coefficient k.
struct FeatureVector {
  Vec values;
};

struct Normalizer {
  Vec feature_mean;
  Vec feature_std;
  // Targets are trained in kHz and reported in Hz.
  double target_scale = 1e-3;
};

inline constexpr double kStdFloor = 1e-8;

FeatureVector ExtractFeatures(const Segment& seg);

// The two halves of ExtractFeatures, exposed so each path can be checked on
// its own.
Vec ExtractLpcFeatures(const Segment& seg);
Vec ExtractSpectralFeatures(const Segment& seg);

Normalizer FitNormalizer(std::span<const FeatureVector> vectors);
FeatureVector ApplyNormalizer(const Normalizer& n, const FeatureVector& v);
FeatureVector InvertNormalizer(const Normalizer& n, const FeatureVector& v);

}  // namespace formant_da

#endif  // FORMANT_DA_FEATURES_H_
