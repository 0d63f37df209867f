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
// RIFF/WAVE reading and writing for 16-bit PCM mono audio.

#ifndef FORMANT_DA_WAV_H_
#define FORMANT_DA_WAV_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "formant_da/common.h"

namespace formant_da {

struct WavData {
  Vec samples;  // scaled by 1/32768
  int sample_rate = 0;
};

WavData ReadWav(const std::filesystem::path& path);
WavData DecodeWav(std::string_view bytes);

// Quantizes with round-half-away-from-zero; samples must lie in [-1, 1].
// 1.0 saturates to 32767.
void WriteWav(const std::filesystem::path& path, std::span<const double> samples,
              int rate);
std::string EncodeWav(std::span<const double> samples, int rate);

}  // namespace formant_da

#endif  // FORMANT_DA_WAV_H_
