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
#include "formant_da/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace formant_da {

namespace {

constexpr int kBaselineOrder = 18;
constexpr double kBaselineMinHz = 90.0;
constexpr double kBaselineMaxHz = 4000.0;
constexpr double kBaselineMaxBandwidth = 400.0;

std::string FormatHz(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Padded(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string LeftPadded(const std::string& s, size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

const DomainErrors* EvalReport::find(const std::string& domain) const {
  for (const DomainErrors& d : domains) {
    if (d.domain == domain) return &d;
  }
  return nullptr;
}

EvalReport MaeReport(const std::string& method,
                     std::span<const Estimate> estimates,
                     const ExampleSet& examples, const FormantMask& requested) {
  if (examples.empty()) throw DataError("cannot evaluate an empty manifest");
  if (estimates.size() != examples.size()) {
    throw std::invalid_argument("estimate count differs from example count");
  }
  struct Acc {
    size_t segments = 0;
    std::array<Vec, kNumFormants> errors;
    std::array<size_t, kNumFormants> missing = {0, 0, 0, 0};
  };
  std::map<std::string, Acc> by_domain;
  std::array<size_t, kNumFormants> annotated = {0, 0, 0, 0};
  for (size_t i = 0; i < examples.size(); ++i) {
    Acc& acc = by_domain[examples.domains[i]];
    ++acc.segments;
    for (int k = 0; k < kNumFormants; ++k) {
      if (!examples.masks[i][k]) continue;
      ++annotated[k];
      if (!estimates[i].present[k]) {
        ++acc.missing[k];
        continue;
      }
      acc.errors[k].push_back(std::abs(estimates[i].hz[k] - examples.targets[i][k]));
    }
  }
  for (int k = 0; k < kNumFormants; ++k) {
    if (requested[k] && annotated[k] == 0) {
      throw DataError("no segment is annotated for F" + std::to_string(k + 1));
    }
  }
  EvalReport report;
  report.method = method;
  for (auto& [domain, acc] : by_domain) {
    DomainErrors d;
    d.domain = domain;
    d.segments = acc.segments;
    d.missing = acc.missing;
    for (int k = 0; k < kNumFormants; ++k) {
      Vec& e = acc.errors[k];
      std::sort(e.begin(), e.end());
      d.counts[k] = e.size();
      double sum = 0.0;
      for (double v : e) sum += v;
      d.mae_hz[k] = e.empty() ? 0.0 : sum / static_cast<double>(e.size());
    }
    report.domains.push_back(std::move(d));
  }
  return report;
}

std::vector<Estimate> PredictAll(const CoreModel& model, const ExampleSet& ex) {
  std::vector<Estimate> out(ex.size());
  for (size_t i = 0; i < ex.size(); ++i) {
    out[i].hz = PredictCore(model, ex.features[i]);
  }
  return out;
}

std::vector<Estimate> PredictAll(const DaModel& model, const ExampleSet& ex) {
  std::vector<Estimate> out(ex.size());
  for (size_t i = 0; i < ex.size(); ++i) {
    out[i].hz = PredictDa(model, ex.features[i]).adapted_hz;
  }
  return out;
}

EvalReport MaeReport(const CoreModel& model, const Manifest& m,
                     const std::string& method) {
  const ExampleSet ex = ExtractExamples(m);
  return MaeReport(method, PredictAll(model, ex), ex);
}

EvalReport MaeReport(const DaModel& model, const Manifest& m,
                     const std::string& method) {
  const ExampleSet ex = ExtractExamples(m);
  return MaeReport(method, PredictAll(model, ex), ex);
}

std::string ReportCsv(std::span<const EvalReport> reports) {
  std::string out =
      "method,domain,segments,f1_mae_hz,f1_n,f2_mae_hz,f2_n,f3_mae_hz,f3_n,"
      "f4_mae_hz_not_evaluated,f4_n\n";
  for (const EvalReport& r : reports) {
    for (const DomainErrors& d : r.domains) {
      out += r.method + ',' + d.domain + ',' + std::to_string(d.segments);
      for (int k = 0; k < kNumFormants; ++k) {
        out += ',';
        if (d.counts[k] > 0) out += FormatHz(d.mae_hz[k]);
        out += ',' + std::to_string(d.counts[k]);
      }
      out += '\n';
    }
  }
  return out;
}

std::string ReportTable(std::span<const EvalReport> reports) {
  // Group rows by dataset, keeping method order as given.
  std::vector<std::string> datasets;
  for (const EvalReport& r : reports) {
    for (const DomainErrors& d : r.domains) {
      if (std::find(datasets.begin(), datasets.end(), d.domain) == datasets.end()) {
        datasets.push_back(d.domain);
      }
    }
  }
  std::sort(datasets.begin(), datasets.end());
  size_t w_data = 7;
  size_t w_method = 6;
  for (const std::string& s : datasets) w_data = std::max(w_data, s.size());
  for (const EvalReport& r : reports) w_method = std::max(w_method, r.method.size());
  constexpr size_t kCell = 9;

  std::string rule(w_data + w_method + 4 + 3 * kCell, '-');
  std::string out = Padded("Dataset", w_data) + "  " + Padded("Method", w_method) +
                    "  " + LeftPadded("F1", kCell) + LeftPadded("F2", kCell) +
                    LeftPadded("F3", kCell) + '\n' + rule + '\n';
  for (const std::string& ds : datasets) {
    bool first = true;
    for (const EvalReport& r : reports) {
      const DomainErrors* d = r.find(ds);
      if (d == nullptr) continue;
      out += Padded(first ? ds : "", w_data) + "  " + Padded(r.method, w_method) + "  ";
      for (int k = 0; k < 3; ++k) {
        out += LeftPadded(d->counts[k] > 0 ? FormatHz(d->mae_hz[k]) : "--", kCell);
      }
      out += '\n';
      first = false;
    }
    out += rule + '\n';
  }
  return out;
}

size_t GateHistogram::total() const {
  size_t t = 0;
  for (size_t c : counts) t += c;
  return t;
}

int GateHistogram::occupied_buckets() const {
  return static_cast<int>(
      std::count_if(counts.begin(), counts.end(), [](size_t c) { return c > 0; }));
}

double GateHistogram::top3_adjacent_share() const {
  const size_t t = total();
  if (t == 0) return 0.0;
  size_t best = 0;
  for (int b = 0; b + 3 <= kGateBuckets; ++b) {
    best = std::max(best, counts[b] + counts[b + 1] + counts[b + 2]);
  }
  return static_cast<double>(best) / static_cast<double>(t);
}

GateHistogram HistogramOf(const std::string& domain, std::span<const double> gates) {
  GateHistogram h;
  h.domain = domain;
  for (double s : gates) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("gate outside [0, 1]");
    const int b = std::min(kGateBuckets - 1, static_cast<int>(s * kGateBuckets));
    ++h.counts[b];
  }
  return h;
}

Vec GateActivations(const DaModel& model, const ExampleSet& ex) {
  Vec gates(ex.size());
  for (size_t i = 0; i < ex.size(); ++i) {
    const FeatureVector c = ApplyNormalizer(model.core.normalizer, ex.features[i]);
    gates[i] = SelectionGate(c.values, model.adapter);
  }
  return gates;
}

std::vector<GateHistogram> SHistogram(const DaModel& model, const ExampleSet& ex) {
  if (ex.empty()) throw DataError("cannot build a histogram of no segments");
  const Vec gates = GateActivations(model, ex);
  std::map<std::string, Vec> by_domain;
  for (size_t i = 0; i < ex.size(); ++i) by_domain[ex.domains[i]].push_back(gates[i]);
  std::vector<GateHistogram> out;
  for (const auto& [domain, g] : by_domain) out.push_back(HistogramOf(domain, g));
  return out;
}

std::vector<GateHistogram> SHistogram(const DaModel& model, const Manifest& m) {
  return SHistogram(model, ExtractExamples(m));
}

std::string HistogramCsv(std::span<const GateHistogram> hists) {
  std::string out = "domain,bucket_lo,bucket_hi,count\n";
  char buf[64];
  for (const GateHistogram& h : hists) {
    for (int b = 0; b < kGateBuckets; ++b) {
      std::snprintf(buf, sizeof(buf), ",%.1f,%.1f,%zu\n",
                    static_cast<double>(b) / kGateBuckets,
                    static_cast<double>(b + 1) / kGateBuckets, h.counts[b]);
      out += h.domain + buf;
    }
  }
  return out;
}

Vec LpcRootCandidates(const Segment& seg) {
  LpcModel lpc;
  try {
    lpc = LevinsonDurbin(LpcAnalysisAutocorrelation(seg, kBaselineOrder),
                         kBaselineOrder);
  } catch (const NumericError&) {
    return {};
  }
  // Companion matrix of z^p + a_1 z^(p-1) + ... + a_p.
  const int p = lpc.order;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) companion(0, j) = -lpc.coefficients[j];
  for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) return {};

  const double rate = seg.sample_rate;
  Vec freqs;
  for (const std::complex<double>& z : solver.eigenvalues()) {
    if (!(z.imag() > 0.0)) continue;
    const double hz = std::arg(z) * rate / (2.0 * std::numbers::pi);
    const double bw = -std::log(std::abs(z)) * rate / std::numbers::pi;
    if (hz < kBaselineMinHz || hz > kBaselineMaxHz) continue;
    if (!(bw < kBaselineMaxBandwidth)) continue;
    freqs.push_back(hz);
  }
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

Estimate LpcRootBaseline(const Segment& seg) {
  const Vec freqs = LpcRootCandidates(seg);
  Estimate e;
  e.present = {false, false, false, false};
  for (size_t k = 0; k < 3 && k < freqs.size(); ++k) {
    e.hz[k] = freqs[k];
    e.present[k] = true;
  }
  return e;
}

}  // namespace formant_da
