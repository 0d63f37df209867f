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
#include "formant_da/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>

#include "formant_da/io_util.h"

namespace formant_da {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

WavData DecodeWav(std::string_view bytes) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const size_t size = bytes.size();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw DataError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t len = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (len > size - body) throw DataError("truncated WAV chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw DataError("WAV fmt chunk too short");
      std::uint16_t format = ReadU16(data + body);
      channels = ReadU16(data + body + 2);
      rate = ReadU32(data + body + 4);
      bits = ReadU16(data + body + 14);
      if (format == kFormatExtensible && len >= 26) {
        format = ReadU16(data + body + 24);  // sub-format GUID prefix
      }
      if (format != kFormatPcm) throw DataError("unsupported WAV encoding (not PCM)");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw DataError("WAV data chunk precedes fmt chunk");
      if (channels != 1) {
        throw DataError("multichannel WAV (" + std::to_string(channels) +
                        " channels); mono required");
      }
      if (bits != 16) {
        throw DataError("unsupported WAV encoding (" + std::to_string(bits) +
                        "-bit); 16-bit PCM required");
      }
      if (rate == 0) throw DataError("WAV sample rate is zero");
      WavData out;
      out.sample_rate = static_cast<int>(rate);
      const size_t n = len / 2;
      out.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(data + body + 2 * i));
        out.samples[i] = v / 32768.0;
      }
      return out;
    }
    pos = body + len + (len & 1);
  }
  throw DataError(have_fmt ? "WAV file has no data chunk"
                           : "WAV file has no fmt chunk");
}

WavData ReadWav(const std::filesystem::path& path) {
  try {
    return DecodeWav(ReadFileBytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string EncodeWav(std::span<const double> samples, int rate) {
  if (rate <= 0) throw std::invalid_argument("sample rate must be positive");
  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  PutU32(out, 36 + data_len);
  out.append("WAVEfmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(rate));
  PutU32(out, static_cast<std::uint32_t>(rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out.append("data");
  PutU32(out, data_len);
  for (double x : samples) {
    if (!(x >= -1.0 && x <= 1.0)) {
      throw std::invalid_argument("WAV samples must lie in [-1, 1]");
    }
    const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, std::span<const double> samples,
              int rate) {
  WriteFileAtomic(path, EncodeWav(samples, rate));
}

}  // namespace formant_da
