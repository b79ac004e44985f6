// gopctc/metrics.hpp

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

#ifndef GOPCTC_METRICS_HPP_
#define GOPCTC_METRICS_HPP_

#include <Eigen/Dense>

#include <span>
#include <string>

namespace gopctc {

constexpr int kNumScores = 5;

/// Counts indexed [reference - 1][prediction - 1].
using ConfusionMatrix = Eigen::Matrix<long, kNumScores, kNumScores>;

struct MetricsReport {
  double uar = 0.0;       // percent
  double f1_macro = 0.0;  // percent
  double accuracy = 0.0;  // percent
  double mae = 0.0;
  ConfusionMatrix confusion = ConfusionMatrix::Zero();
  Eigen::Matrix<long, kNumScores, 1> support = Eigen::Matrix<long, kNumScores, 1>::Zero();
};

ConfusionMatrix confusion_matrix(std::span<const int> refs, std::span<const int> preds);

/// UAR and macro-F1 average only over classes present in `refs`.
MetricsReport evaluate(std::span<const int> refs, std::span<const int> preds);

/// Fixed-width text table: headline metrics plus the confusion matrix.
std::string format_report_table(const MetricsReport &report);

}  // namespace gopctc

#endif  // GOPCTC_METRICS_HPP_
