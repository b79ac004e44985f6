// src/ordinal_loss.cpp

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

#include "gopctc/ordinal_loss.hpp"

#include <algorithm>
#include <cmath>

#include "gopctc/errors.hpp"
#include "gopctc/log_math.hpp"

namespace gopctc {

LossKind parse_loss_kind(const std::string &name) {
  if (name == "ordinal") return LossKind::kOrdinal;
  if (name == "ce") return LossKind::kCrossEntropy;
  throw InvalidInput("unknown loss '" + name + "' (expected ordinal|ce)");
}

const char *to_string(LossKind kind) {
  return kind == LossKind::kOrdinal ? "ordinal" : "ce";
}

void OrdinalLossConfig::validate() const {
  if (num_classes < 2) throw InvalidInput("loss: need at least 2 classes");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InvalidInput("loss: alpha must be >= 0");
  if (class_weights.size() != num_classes)
    throw InvalidInput("loss: class_weights size differs from num_classes");
  if (!(class_weights.array() > 0.0).all() || !class_weights.allFinite())
    throw InvalidInput("loss: class weights must be positive");
}

namespace {

void check_label(int y, const OrdinalLossConfig &cfg) {
  if (y < 1 || y > cfg.num_classes)
    throw InvalidInput("loss: label " + std::to_string(y) + " outside 1.." +
                       std::to_string(cfg.num_classes));
}

// |y - i|^alpha with the true class contributing nothing, also at alpha = 0.
double distance_penalty(int y, int i, double alpha) {
  if (y == i) return 0.0;
  return std::pow(static_cast<double>(std::abs(y - i)), alpha);
}

}  // namespace

double loss_value(const Eigen::Ref<const Eigen::VectorXd> &posterior, int y,
                  const OrdinalLossConfig &cfg) {
  check_label(y, cfg);
  if (posterior.size() != cfg.num_classes)
    throw InvalidInput("loss: posterior has wrong size");
  if (!posterior.allFinite() || (posterior.array() < 0.0).any() ||
      std::abs(posterior.sum() - 1.0) > 1e-9)
    throw InvalidInput("loss: posterior must be nonnegative and sum to 1");

  const double w = cfg.class_weights(y - 1);
  if (cfg.kind == LossKind::kCrossEntropy)
    return -w * std::log(std::max(posterior(y - 1), 1e-300));

  double loss = 0.0;
  for (int i = 1; i <= cfg.num_classes; ++i) {
    if (i == y) continue;
    const double p = std::min(posterior(i - 1), kMaxComplementProb);
    loss += w * -std::log1p(-p) * distance_penalty(y, i, cfg.alpha);
  }
  return loss;
}

double loss_from_logits(const Eigen::Ref<const Eigen::VectorXd> &logits, int y,
                        const OrdinalLossConfig &cfg) {
  return loss_value(softmax(logits), y, cfg);
}

Eigen::VectorXd loss_grad_logits(const Eigen::Ref<const Eigen::VectorXd> &logits, int y,
                                 const OrdinalLossConfig &cfg) {
  check_label(y, cfg);
  if (logits.size() != cfg.num_classes) throw InvalidInput("loss: logits have wrong size");
  if (!logits.allFinite()) throw InvalidInput("loss: logits must be finite");

  const Eigen::VectorXd p = softmax(logits);
  const double w = cfg.class_weights(y - 1);
  if (cfg.kind == LossKind::kCrossEntropy) {
    Eigen::VectorXd g = w * p;
    g(y - 1) -= w;
    return g;
  }

  // dL/dp_i, then through the softmax Jacobian: dL/dz = p .* (g - <g, p>).
  Eigen::VectorXd dp = Eigen::VectorXd::Zero(cfg.num_classes);
  for (int i = 1; i <= cfg.num_classes; ++i) {
    if (i == y || p(i - 1) >= kMaxComplementProb) continue;
    dp(i - 1) = w * distance_penalty(y, i, cfg.alpha) / (1.0 - p(i - 1));
  }
  return p.cwiseProduct((dp.array() - dp.dot(p)).matrix());
}

Eigen::VectorXd balanced_class_weights(std::span<const long> label_counts) {
  const auto n = static_cast<Eigen::Index>(label_counts.size());
  if (n == 0) throw InvalidInput("class weights: no classes");
  long total = 0;
  for (long c : label_counts) {
    if (c < 0) throw InvalidInput("class weights: negative count");
    total += c;
  }
  if (total == 0) throw InvalidInput("class weights: all class counts are zero");

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  double max_w = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (label_counts[i] == 0) continue;
    w(i) = static_cast<double>(total) / (static_cast<double>(n) * label_counts[i]);
    max_w = std::max(max_w, w(i));
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (label_counts[i] == 0) w(i) = max_w;
  return w;
}

}  // namespace gopctc
