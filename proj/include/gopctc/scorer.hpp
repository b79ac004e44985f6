// gopctc/scorer.hpp

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

#ifndef GOPCTC_SCORER_HPP_
#define GOPCTC_SCORER_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gopctc/gop_features.hpp"
#include "gopctc/metrics.hpp"
#include "gopctc/ordinal_loss.hpp"

namespace gopctc {

using ScoreVector = Eigen::Matrix<double, kNumScores, 1>;
using ScoreWeights = Eigen::Matrix<double, kNumScores, Eigen::Dynamic>;

constexpr double kStdFloor = 1e-6;

enum class ClassWeightMode { kBalanced, kUniform, kExplicit };

ClassWeightMode parse_class_weight_mode(const std::string &name);
const char *to_string(ClassWeightMode mode);

struct TrainConfig {
  double alpha = 0.5;
  LossKind loss = LossKind::kOrdinal;
  ClassWeightMode weight_mode = ClassWeightMode::kBalanced;
  Eigen::VectorXd explicit_weights;  // used with kExplicit only
  double lr = 0.1;
  int epochs = 10;
  int batch_size = 64;
  std::uint64_t seed = 42;
  bool use_letter_features = true;
};

/// Standardization statistics plus a linear map to 5 class logits.
struct ScorerModel {
  int feature_dim = 0;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;
  ScoreWeights weights;
  ScoreVector bias = ScoreVector::Zero();
  std::string vocab_fingerprint;
  TrainConfig config;
  Eigen::VectorXd class_weights = Eigen::VectorXd::Ones(kNumScores);
  int best_epoch = 0;
  double best_dev_uar = 0.0;

  /// Zero weights, identity standardization.
  static ScorerModel zeros(int feature_dim);
};

struct Prediction {
  std::string utt_id;
  ScoreVector posterior = ScoreVector::Zero();
  int predicted_class = 1;
};

/// Index (1-based) of the largest entry; ties resolve to the lowest class.
int argmax_lowest(const ScoreVector &posterior);

/// Per-dimension mean and floored std over all letter rows of `set`.
void compute_standardization(std::span<const GopFeatureSet> set, Eigen::VectorXd &mean,
                             Eigen::VectorXd &std_dev);

/// Z-score each letter row with the model's statistics, then take the
/// elementwise max over letters.
Eigen::VectorXd pool_utterance(const GopFeatureSet &features, const ScorerModel &model);

ScoreVector predict_logits(const ScorerModel &model, const Eigen::VectorXd &pooled);
Prediction predict(const ScorerModel &model, const GopFeatureSet &features);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;  // mean loss over the full training set after the epoch
  double dev_uar = -1.0;    // -1 when no dev set
};

struct TrainResult {
  ScorerModel model;
  std::vector<EpochLog> history;
};

/// Mini-batch gradient descent on the linear head. With a dev set the
/// parameters of the epoch with the highest dev UAR are returned (earliest
/// on ties); otherwise the final epoch's. Bit-reproducible for fixed inputs
/// and seed.
TrainResult train(std::span<const GopFeatureSet> train_set, std::span<const int> train_labels,
                  std::span<const GopFeatureSet> dev_set, std::span<const int> dev_labels,
                  const TrainConfig &cfg, const std::string &vocab_fingerprint = {},
                  const std::function<void(const EpochLog &)> &on_epoch = {});

/// One system's predictions, one entry per utterance.
using PredictionSet = std::vector<Prediction>;

/// Per-utterance convex combination of posteriors. Output is sorted by
/// utt_id.
PredictionSet interpolate(std::span<const PredictionSet> systems, std::span<const double> weights);

struct InterpolationSearch {
  std::vector<double> weights;
  double uar = 0.0;
  double mae = 0.0;
};

/// Exhaustive search over the simplex grid with spacing `step` (1/step must
/// be an integer). Maximizes UAR, then minimizes MAE, then prefers the
/// lexicographically smallest weight vector.
InterpolationSearch optimize_interpolation(std::span<const PredictionSet> systems,
                                           const std::map<std::string, int> &references,
                                           double step = 0.1);

}  // namespace gopctc

#endif  // GOPCTC_SCORER_HPP_
