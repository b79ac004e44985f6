// src/metrics.cpp

// Copyright 2025  gopctc authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "gopctc/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "gopctc/errors.hpp"

namespace gopctc {

ConfusionMatrix confusion_matrix(std::span<const int> refs, std::span<const int> preds) {
  if (refs.size() != preds.size())
    throw InvalidInput("metrics: " + std::to_string(refs.size()) + " references vs " +
                       std::to_string(preds.size()) + " predictions");
  ConfusionMatrix cm = ConfusionMatrix::Zero();
  for (std::size_t n = 0; n < refs.size(); ++n) {
    const int r = refs[n], p = preds[n];
    if (r < 1 || r > kNumScores || p < 1 || p > kNumScores)
      throw InvalidInput("metrics: label outside 1..5 at index " + std::to_string(n));
    ++cm(r - 1, p - 1);
  }
  return cm;
}

MetricsReport evaluate(std::span<const int> refs, std::span<const int> preds) {
  if (refs.empty()) throw InvalidInput("metrics: no samples");
  MetricsReport rep;
  rep.confusion = confusion_matrix(refs, preds);
  rep.support = rep.confusion.rowwise().sum();
  const Eigen::Matrix<long, 1, kNumScores> predicted = rep.confusion.colwise().sum();

  double recall_sum = 0.0, f1_sum = 0.0;
  int present = 0;
  for (int c = 0; c < kNumScores; ++c) {
    if (rep.support(c) == 0) continue;
    ++present;
    const double tp = static_cast<double>(rep.confusion(c, c));
    recall_sum += tp / static_cast<double>(rep.support(c));
    f1_sum += 2.0 * tp / static_cast<double>(rep.support(c) + predicted(c));
  }
  const double total = static_cast<double>(refs.size());
  rep.uar = 100.0 * recall_sum / present;
  rep.f1_macro = 100.0 * f1_sum / present;
  rep.accuracy = 100.0 * static_cast<double>(rep.confusion.trace()) / total;

  long abs_err = 0;
  for (std::size_t n = 0; n < refs.size(); ++n) abs_err += std::abs(refs[n] - preds[n]);
  rep.mae = static_cast<double>(abs_err) / total;
  return rep;
}

std::string format_report_table(const MetricsReport &report) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof(line), "UAR %.1f  F1 %.1f  ACC %.1f  MAE %.3f\n", report.uar,
                report.f1_macro, report.accuracy, report.mae);
  os << line;
  os << "ref\\pred      1      2      3      4      5 | support\n";
  for (int r = 0; r < kNumScores; ++r) {
    std::snprintf(line, sizeof(line), "%8d", r + 1);
    os << line;
    for (int p = 0; p < kNumScores; ++p) {
      std::snprintf(line, sizeof(line), " %6ld", report.confusion(r, p));
      os << line;
    }
    std::snprintf(line, sizeof(line), " | %7ld\n", report.support(r));
    os << line;
  }
  return os.str();
}

}  // namespace gopctc
