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
#include "formant_da/manifest.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "formant_da/io_util.h"
#include "formant_da/wav.h"

namespace formant_da {

namespace {

// Splits one CSV record. Fields may be double-quoted with "" escapes.
std::vector<std::string> SplitCsv(std::string_view line, size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && cur.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) {
    throw DataError("manifest line " + std::to_string(line_no) +
                    ": unterminated quoted field");
  }
  fields.push_back(std::move(cur));
  return fields;
}

double ParseNumber(const std::string& s, const char* what, size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError("manifest line " + std::to_string(line_no) + ": bad " +
                    what + " '" + s + "'");
  }
  return v;
}

std::string ShortestDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string QuoteIfNeeded(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Manifest ParseManifest(std::string_view text, std::string name,
                       std::filesystem::path base_dir) {
  Manifest m;
  m.name = std::move(name);
  m.base_dir = std::move(base_dir);
  size_t line_no = 0;
  size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kManifestHeader) {
        throw DataError("manifest line 1: expected header '" +
                        std::string(kManifestHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f = SplitCsv(line, line_no);
    // A row may stop after f4; the domain then defaults to the manifest name.
    if (f.size() == 7) f.emplace_back();
    if (f.size() != 8) {
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": expected 8 fields, got " + std::to_string(f.size()));
    }
    ManifestEntry e;
    e.path = f[0];
    if (e.path.empty()) {
      throw DataError("manifest line " + std::to_string(line_no) + ": empty path");
    }
    e.start_s = ParseNumber(f[1], "start_s", line_no);
    e.end_s = ParseNumber(f[2], "end_s", line_no);
    if (e.start_s < 0.0 || !(e.end_s > e.start_s)) {
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": need 0 <= start_s < end_s");
    }
    for (int i = 0; i < kNumFormants; ++i) {
      const std::string& cell = f[3 + i];
      if (cell.empty()) continue;
      e.formants[i] = ParseNumber(cell, "formant", line_no);
      e.mask[i] = true;
    }
    if (!FormantsConsistent(e.formants, e.mask)) {
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": formants must be positive and strictly increasing");
    }
    e.domain = f[7].empty() ? m.name : f[7];
    m.entries.push_back(std::move(e));
  }
  if (!saw_header) throw DataError("manifest is empty (missing header)");
  return m;
}

std::string FormatManifest(const Manifest& m) {
  std::string out(kManifestHeader);
  out.push_back('\n');
  char buf[64];
  for (const ManifestEntry& e : m.entries) {
    out += QuoteIfNeeded(e.path);
    out += ',' + ShortestDouble(e.start_s) + ',' + ShortestDouble(e.end_s);
    for (int i = 0; i < kNumFormants; ++i) {
      out.push_back(',');
      if (!e.mask[i]) continue;
      std::snprintf(buf, sizeof(buf), "%.2f", e.formants[i]);
      out += buf;
    }
    out += ',' + QuoteIfNeeded(e.domain) + '\n';
  }
  return out;
}

Manifest LoadManifest(const std::filesystem::path& path) {
  try {
    return ParseManifest(ReadFileBytes(path), path.stem().string(),
                         path.parent_path());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void SaveManifest(const Manifest& m, const std::filesystem::path& path) {
  WriteFileAtomic(path, FormatManifest(m));
}

Segment LoadSegment(const Manifest& m, size_t index) {
  if (index >= m.entries.size()) throw std::out_of_range("manifest index");
  const ManifestEntry& e = m.entries[index];
  std::filesystem::path audio(e.path);
  if (audio.is_relative()) audio = m.base_dir / audio;
  const WavData wav = ReadWav(audio);
  const double rate = wav.sample_rate;
  const auto n = static_cast<long>(wav.samples.size());
  const long begin = std::lround(e.start_s * rate);
  const long end = std::lround(e.end_s * rate);
  if (begin >= end || end > n) {
    throw DataError(audio.string() + ": segment [" + ShortestDouble(e.start_s) +
                    ", " + ShortestDouble(e.end_s) + ") lies outside the audio");
  }
  Segment seg = Preprocess(
      std::span<const double>(wav.samples.data() + begin, end - begin),
      wav.sample_rate);
  seg.targets = e.formants;
  seg.mask = e.mask;
  seg.domain_label = e.domain;
  return seg;
}

}  // namespace formant_da
