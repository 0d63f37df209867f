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
// Corpus manifests: CSV with header
//
//   path,start_s,end_s,f1,f2,f3,f4,domain
//
// Formants are in Hz; an empty cell marks that formant as not annotated.

#ifndef FORMANT_DA_MANIFEST_H_
#define FORMANT_DA_MANIFEST_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "formant_da/common.h"
#include "formant_da/signal.h"

namespace formant_da {

struct ManifestEntry {
  std::string path;
  double start_s = 0.0;
  double end_s = 0.0;
  Formants formants = {0.0, 0.0, 0.0, 0.0};
  FormantMask mask = {false, false, false, false};
  std::string domain;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::string name;
  // Relative audio paths are resolved against this directory.
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;
};

inline constexpr std::string_view kManifestHeader =
    "path,start_s,end_s,f1,f2,f3,f4,domain";

// Empty formant cells are masked out. The domain column may be empty or
// missing, in which case the entry takes the manifest name as its domain.
// Errors are DataError and name the offending line.
Manifest ParseManifest(std::string_view text, std::string name = "",
                       std::filesystem::path base_dir = {});
std::string FormatManifest(const Manifest& m);

Manifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const Manifest& m, const std::filesystem::path& path);

// Reads the entry's audio, cuts [start_s, end_s), resamples to 16 kHz and
// normalizes. Targets, mask and domain label are attached.
Segment LoadSegment(const Manifest& m, size_t index);

}  // namespace formant_da

#endif  // FORMANT_DA_MANIFEST_H_
