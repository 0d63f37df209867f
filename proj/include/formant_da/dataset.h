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
// Feature extraction over whole manifests, in parallel, with results kept
// in manifest order.

#ifndef FORMANT_DA_DATASET_H_
#define FORMANT_DA_DATASET_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "formant_da/features.h"
#include "formant_da/manifest.h"

namespace formant_da {

struct ExampleSet {
  std::vector<FeatureVector> features;  // raw, not normalized
  std::vector<Formants> targets;        // Hz
  std::vector<FormantMask> masks;
  std::vector<std::string> domains;

  size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }
  void Append(const ExampleSet& other);
};

// Worker count: FORMANT_DA_THREADS if set to a positive integer, otherwise
// the number of logical cores.
int WorkerCount();

// Runs fn(i) for i in [0, n) on WorkerCount() threads. If any call throws,
// the exception of the lowest failing index is rethrown.
void ParallelFor(size_t n, const std::function<void(size_t)>& fn);

// Loads and featurizes every entry. Errors carry the entry's path.
ExampleSet ExtractExamples(const Manifest& m);
ExampleSet ExtractExamples(std::span<const Manifest> manifests);

}  // namespace formant_da

#endif  // FORMANT_DA_DATASET_H_
