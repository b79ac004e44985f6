// gopctc/ordinal_loss.hpp

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

#ifndef GOPCTC_ORDINAL_LOSS_HPP_
#define GOPCTC_ORDINAL_LOSS_HPP_

#include <Eigen/Dense>

#include <span>
#include <string>

namespace gopctc {

enum class LossKind {
  kOrdinal,     // sum_{i != y} w_y * -log(1 - p_i) * |y - i|^alpha
  kCrossEntropy // -w_y * log p_y
};

LossKind parse_loss_kind(const std::string &name);
const char *to_string(LossKind kind);

/// Classes are 1-based in the public API (labels 1..N); vectors are 0-based.
struct OrdinalLossConfig {
  int num_classes = 5;
  double alpha = 0.5;
  Eigen::VectorXd class_weights = Eigen::VectorXd::Ones(5);
  LossKind kind = LossKind::kOrdinal;

  /// Throws InvalidInput when alpha < 0, sizes disagree or a weight is <= 0.
  void validate() const;
};

/// Largest probability fed into log1p(-p); keeps -log(1 - p) finite.
constexpr double kMaxComplementProb = 1.0 - 1e-12;

/// Loss of one posterior against label y in 1..N.
double loss_value(const Eigen::Ref<const Eigen::VectorXd> &posterior, int y,
                  const OrdinalLossConfig &cfg);

/// Gradient of loss_value(softmax(logits), y) with respect to the logits.
Eigen::VectorXd loss_grad_logits(const Eigen::Ref<const Eigen::VectorXd> &logits, int y,
                                 const OrdinalLossConfig &cfg);

/// Loss evaluated on softmax(logits); convenience for training and tests.
double loss_from_logits(const Eigen::Ref<const Eigen::VectorXd> &logits, int y,
                        const OrdinalLossConfig &cfg);

/// w_y = total / (N * count_y); zero-count classes get the largest computed
/// weight.
Eigen::VectorXd balanced_class_weights(std::span<const long> label_counts);

}  // namespace gopctc

#endif  // GOPCTC_ORDINAL_LOSS_HPP_
