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
// Shared vocabulary types and the error hierarchy used across the library.

#ifndef FORMANT_DA_COMMON_H_
#define FORMANT_DA_COMMON_H_

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace formant_da {

inline constexpr int kNumFormants = 4;
inline constexpr int kAnalysisRate = 16000;

using Vec = std::vector<double>;
using Formants = std::array<double, kNumFormants>;
using FormantMask = std::array<bool, kNumFormants>;

inline constexpr FormantMask kAllFormants = {true, true, true, true};

// Malformed or unreadable input data (files, manifests, corpora).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not produce a valid result (silent frame,
// unstable recursion, non-finite values).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations on arguments use std::invalid_argument.

// True when every present target is positive and the present targets are
// strictly increasing.
bool FormantsConsistent(const Formants& f, const FormantMask& mask);

}  // namespace formant_da

#endif  // FORMANT_DA_COMMON_H_
