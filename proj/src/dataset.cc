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
#include "formant_da/dataset.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

namespace formant_da {

void ExampleSet::Append(const ExampleSet& other) {
  features.insert(features.end(), other.features.begin(), other.features.end());
  targets.insert(targets.end(), other.targets.begin(), other.targets.end());
  masks.insert(masks.end(), other.masks.begin(), other.masks.end());
  domains.insert(domains.end(), other.domains.begin(), other.domains.end());
}

int WorkerCount() {
  if (const char* env = std::getenv("FORMANT_DA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void ParallelFor(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(WorkerCount(), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExampleSet ExtractExamples(const Manifest& m) {
  const size_t n = m.entries.size();
  ExampleSet set;
  set.features.resize(n);
  ParallelFor(n, [&](size_t i) {
    const Segment seg = LoadSegment(m, i);
    try {
      set.features[i] = ExtractFeatures(seg);
    } catch (const NumericError& e) {
      throw NumericError(m.entries[i].path + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(m.entries[i].path + ": " + e.what());
    }
  });
  for (const ManifestEntry& e : m.entries) {
    set.targets.push_back(e.formants);
    set.masks.push_back(e.mask);
    set.domains.push_back(e.domain);
  }
  return set;
}

ExampleSet ExtractExamples(std::span<const Manifest> manifests) {
  ExampleSet all;
  for (const Manifest& m : manifests) all.Append(ExtractExamples(m));
  return all;
}

}  // namespace formant_da
