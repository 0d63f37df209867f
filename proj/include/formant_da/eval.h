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
// Mean-absolute-error reports, selection-gate histograms, and a classical
// LPC root-solving formant picker used as a reference method.

#ifndef FORMANT_DA_EVAL_H_
#define FORMANT_DA_EVAL_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "formant_da/adaptation.h"
#include "formant_da/dataset.h"
#include "formant_da/manifest.h"
#include "formant_da/nn.h"
#include "formant_da/signal.h"

namespace formant_da {

// A formant estimate; slots the method could not fill are marked absent.
struct Estimate {
  Formants hz = {0.0, 0.0, 0.0, 0.0};
  FormantMask present = kAllFormants;
};

struct DomainErrors {
  std::string domain;
  size_t segments = 0;
  Formants mae_hz = {0.0, 0.0, 0.0, 0.0};
  std::array<size_t, kNumFormants> counts = {0, 0, 0, 0};
  // Annotated slots the method left absent.
  std::array<size_t, kNumFormants> missing = {0, 0, 0, 0};
};

struct EvalReport {
  std::string method;
  std::vector<DomainErrors> domains;  // sorted by domain name

  const DomainErrors* find(const std::string& domain) const;
};

// F1..F3 are evaluated; F4 is computed but not part of headline tables.
inline constexpr FormantMask kEvaluatedFormants = {true, true, true, false};

// Per domain and formant, the mean of |estimate - target| over segments
// where the target is annotated and the estimate present. Errors are summed
// in sorted order so the result does not depend on segment order. Throws
// DataError if a requested formant has no annotated segment at all.
EvalReport MaeReport(const std::string& method,
                     std::span<const Estimate> estimates,
                     const ExampleSet& examples,
                     const FormantMask& requested = kEvaluatedFormants);

std::vector<Estimate> PredictAll(const CoreModel& model, const ExampleSet& ex);
// Adapted outputs g.
std::vector<Estimate> PredictAll(const DaModel& model, const ExampleSet& ex);

EvalReport MaeReport(const CoreModel& model, const Manifest& m,
                     const std::string& method = "core");
EvalReport MaeReport(const DaModel& model, const Manifest& m,
                     const std::string& method = "domain_adaptation");

// CSV with header
// method,domain,segments,f1_mae_hz,f1_n,f2_mae_hz,f2_n,f3_mae_hz,f3_n,
// f4_mae_hz_not_evaluated,f4_n
// Cells without any evaluated segment are left empty.
std::string ReportCsv(std::span<const EvalReport> reports);

// Aligned text table (dataset x method x F1-F3); "--" marks empty cells.
std::string ReportTable(std::span<const EvalReport> reports);

inline constexpr int kGateBuckets = 10;

struct GateHistogram {
  std::string domain;
  std::array<size_t, kGateBuckets> counts{};

  size_t total() const;
  int occupied_buckets() const;
  // Largest share of the mass inside any three adjacent buckets.
  double top3_adjacent_share() const;
};

// Bucket b covers [b/10, (b+1)/10); the top bucket also takes s == 1.
GateHistogram HistogramOf(const std::string& domain, std::span<const double> gates);

// Gate activations per example (normalized features fed to the gate).
Vec GateActivations(const DaModel& model, const ExampleSet& ex);

// One histogram per domain label, sorted by name.
std::vector<GateHistogram> SHistogram(const DaModel& model, const ExampleSet& ex);
std::vector<GateHistogram> SHistogram(const DaModel& model, const Manifest& m);

// CSV with header domain,bucket_lo,bucket_hi,count.
std::string HistogramCsv(std::span<const GateHistogram> hists);

// LPC order-12 polynomial roots of the pre-emphasized, Hamming-windowed
// segment; candidate poles in [90, 4000] Hz with bandwidth < 400 Hz, sorted,
// fill F1..F3. F4 is always absent.
Estimate LpcRootBaseline(const Segment& seg);

// All candidate pole frequencies (Hz) passing the baseline's filters,
// ascending.
Vec LpcRootCandidates(const Segment& seg);

}  // namespace formant_da

#endif  // FORMANT_DA_EVAL_H_
