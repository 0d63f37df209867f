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
// Small filesystem helpers shared by the writers.

#ifndef FORMANT_DA_IO_UTIL_H_
#define FORMANT_DA_IO_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace formant_da {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file. Throws DataError on failure.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

// Throws DataError if the file cannot be read.
std::string ReadFileBytes(const std::filesystem::path& path);

}  // namespace formant_da

#endif  // FORMANT_DA_IO_UTIL_H_
