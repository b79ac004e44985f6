// src/scorer.cpp

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

#include "gopctc/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gopctc/errors.hpp"
#include "gopctc/log_math.hpp"

namespace gopctc {

ClassWeightMode parse_class_weight_mode(const std::string &name) {
  if (name == "balanced") return ClassWeightMode::kBalanced;
  if (name == "uniform") return ClassWeightMode::kUniform;
  throw InvalidInput("unknown class weight mode '" + name + "' (expected balanced|uniform)");
}

const char *to_string(ClassWeightMode mode) {
  switch (mode) {
    case ClassWeightMode::kBalanced: return "balanced";
    case ClassWeightMode::kUniform: return "uniform";
    case ClassWeightMode::kExplicit: return "explicit";
  }
  return "?";
}

ScorerModel ScorerModel::zeros(int feature_dim) {
  ScorerModel m;
  m.feature_dim = feature_dim;
  m.feature_mean = Eigen::VectorXd::Zero(feature_dim);
  m.feature_std = Eigen::VectorXd::Ones(feature_dim);
  m.weights = ScoreWeights::Zero(kNumScores, feature_dim);
  m.bias.setZero();
  return m;
}

int argmax_lowest(const ScoreVector &posterior) {
  int best = 0;
  for (int c = 1; c < kNumScores; ++c)
    if (posterior(c) > posterior(best)) best = c;
  return best + 1;
}

void compute_standardization(std::span<const GopFeatureSet> set, Eigen::VectorXd &mean,
                             Eigen::VectorXd &std_dev) {
  if (set.empty()) throw InvalidInput("scorer: empty feature set");
  const int D = set.front().feature_dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(D);
  long rows = 0;
  for (const auto &fs : set) {
    if (fs.feature_dim() != D) throw InvalidInput("scorer: " + fs.utt_id + ": feature dimension mismatch");
    const Eigen::MatrixXd f = fs.feature_matrix();
    sum += f.colwise().sum().transpose();
    rows += f.rows();
  }
  if (rows == 0) throw InvalidInput("scorer: feature set has no letter rows");
  mean = sum / static_cast<double>(rows);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(D);
  for (const auto &fs : set) {
    const Eigen::MatrixXd centered = fs.feature_matrix().rowwise() - mean.transpose();
    sq += centered.array().square().matrix().colwise().sum().transpose();
  }
  std_dev = (sq / static_cast<double>(rows)).cwiseSqrt().cwiseMax(kStdFloor);
}

Eigen::VectorXd pool_utterance(const GopFeatureSet &features, const ScorerModel &model) {
  if (features.feature_dim() != model.feature_dim)
    throw InvalidInput("scorer: " + features.utt_id + ": feature dimension " +
                       std::to_string(features.feature_dim()) + " incompatible with model (" +
                       std::to_string(model.feature_dim) + ")");
  if (features.num_letters_in_word() < 1)
    throw InvalidInput("scorer: " + features.utt_id + ": no letters to pool");
  const Eigen::MatrixXd z =
      ((features.feature_matrix().rowwise() - model.feature_mean.transpose()).array().rowwise() /
       model.feature_std.transpose().array())
          .matrix();
  Eigen::VectorXd pooled = z.colwise().maxCoeff().transpose();
  if (!model.config.use_letter_features) {
    const int V = features.vocab_letters();
    pooled.tail(V).setZero();
  }
  return pooled;
}

ScoreVector predict_logits(const ScorerModel &model, const Eigen::VectorXd &pooled) {
  return model.weights * pooled + model.bias;
}

Prediction predict(const ScorerModel &model, const GopFeatureSet &features) {
  Prediction p;
  p.utt_id = features.utt_id;
  p.posterior = softmax(predict_logits(model, pool_utterance(features, model)));
  p.predicted_class = argmax_lowest(p.posterior);
  return p;
}

namespace {

void check_labels(std::span<const int> labels, std::size_t n, const char *what) {
  if (labels.size() != n)
    throw InvalidInput(std::string("scorer: ") + what + ": label count differs from feature count");
  for (int y : labels)
    if (y < 1 || y > kNumScores)
      throw InvalidInput(std::string("scorer: ") + what + ": label " + std::to_string(y) +
                         " outside 1..5");
}

Eigen::MatrixXd pool_all(std::span<const GopFeatureSet> set, const ScorerModel &model) {
  Eigen::MatrixXd x(model.feature_dim, static_cast<Eigen::Index>(set.size()));
  for (std::size_t n = 0; n < set.size(); ++n)
    x.col(static_cast<Eigen::Index>(n)) = pool_utterance(set[n], model);
  return x;
}

double dev_uar(const ScorerModel &model, const Eigen::MatrixXd &x, std::span<const int> labels) {
  std::vector<int> preds(labels.size());
  for (Eigen::Index n = 0; n < x.cols(); ++n)
    preds[n] = argmax_lowest(softmax(predict_logits(model, x.col(n))));
  return evaluate(labels, preds).uar;
}

}  // namespace

TrainResult train(std::span<const GopFeatureSet> train_set, std::span<const int> train_labels,
                  std::span<const GopFeatureSet> dev_set, std::span<const int> dev_labels,
                  const TrainConfig &cfg, const std::string &vocab_fingerprint,
                  const std::function<void(const EpochLog &)> &on_epoch) {
  if (train_set.empty()) throw InvalidInput("scorer: empty training set");
  check_labels(train_labels, train_set.size(), "train");
  check_labels(dev_labels, dev_set.size(), "dev");
  if (cfg.epochs < 0) throw InvalidInput("scorer: epochs must be >= 0");
  if (cfg.batch_size < 1) throw InvalidInput("scorer: batch size must be >= 1");
  if (!(cfg.lr > 0.0)) throw InvalidInput("scorer: learning rate must be > 0");

  const int D = train_set.front().feature_dim();
  for (const auto &fs : dev_set)
    if (fs.feature_dim() != D)
      throw InvalidInput("scorer: dev utterance " + fs.utt_id +
                         " has a different vocabulary size than the training set");

  TrainResult result;
  ScorerModel &model = result.model;
  model = ScorerModel::zeros(D);
  model.vocab_fingerprint = vocab_fingerprint;
  model.config = cfg;
  compute_standardization(train_set, model.feature_mean, model.feature_std);

  OrdinalLossConfig loss_cfg;
  loss_cfg.num_classes = kNumScores;
  loss_cfg.alpha = cfg.alpha;
  loss_cfg.kind = cfg.loss;
  switch (cfg.weight_mode) {
    case ClassWeightMode::kUniform:
      loss_cfg.class_weights = Eigen::VectorXd::Ones(kNumScores);
      break;
    case ClassWeightMode::kExplicit:
      loss_cfg.class_weights = cfg.explicit_weights;
      break;
    case ClassWeightMode::kBalanced: {
      std::vector<long> counts(kNumScores, 0);
      for (int y : train_labels) ++counts[y - 1];
      loss_cfg.class_weights = balanced_class_weights(counts);
      break;
    }
  }
  loss_cfg.validate();
  model.class_weights = loss_cfg.class_weights;

  const Eigen::MatrixXd x = pool_all(train_set, model);
  const Eigen::MatrixXd x_dev = dev_set.empty() ? Eigen::MatrixXd() : pool_all(dev_set, model);
  const auto n = static_cast<Eigen::Index>(train_set.size());

  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  ScorerModel best = model;
  double best_uar = -1.0;
  ScoreWeights grad_w(kNumScores, D);
  ScoreVector grad_b;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index stop = std::min<Eigen::Index>(start + cfg.batch_size, n);
      grad_w.setZero();
      grad_b.setZero();
      for (Eigen::Index k = start; k < stop; ++k) {
        const Eigen::Index idx = order[k];
        const ScoreVector g = loss_grad_logits(predict_logits(model, x.col(idx)),
                                               train_labels[idx], loss_cfg);
        grad_w.noalias() += g * x.col(idx).transpose();
        grad_b += g;
      }
      const double scale = cfg.lr / static_cast<double>(stop - start);
      model.weights -= scale * grad_w;
      model.bias -= scale * grad_b;
    }

    EpochLog log;
    log.epoch = epoch;
    double loss = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      loss += loss_from_logits(predict_logits(model, x.col(k)), train_labels[k], loss_cfg);
    log.train_loss = loss / static_cast<double>(n);
    if (!dev_set.empty()) {
      log.dev_uar = dev_uar(model, x_dev, dev_labels);
      if (log.dev_uar > best_uar) {
        best_uar = log.dev_uar;
        best = model;
        best.best_epoch = epoch;
        best.best_dev_uar = log.dev_uar;
      }
    }
    result.history.push_back(log);
    if (on_epoch) on_epoch(log);
  }

  if (!dev_set.empty() && cfg.epochs > 0) {
    model = best;
  } else {
    model.best_epoch = cfg.epochs;
    model.best_dev_uar = dev_set.empty() || cfg.epochs == 0 ? -1.0 : best_uar;
  }
  return result;
}

PredictionSet interpolate(std::span<const PredictionSet> systems, std::span<const double> weights) {
  if (systems.empty()) throw InvalidInput("interpolate: no systems");
  if (weights.size() != systems.size())
    throw InvalidInput("interpolate: " + std::to_string(weights.size()) + " weights for " +
                       std::to_string(systems.size()) + " systems");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("interpolate: weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("interpolate: weights must sum to 1");

  std::vector<std::map<std::string, const Prediction *>> index(systems.size());
  for (std::size_t s = 0; s < systems.size(); ++s) {
    for (const auto &p : systems[s])
      if (!index[s].emplace(p.utt_id, &p).second)
        throw InvalidInput("interpolate: duplicate utt_id " + p.utt_id + " in system " +
                           std::to_string(s + 1));
    if (s > 0 && index[s].size() != index[0].size())
      throw InvalidInput("interpolate: system " + std::to_string(s + 1) +
                         " covers a different utterance set");
  }

  PredictionSet out;
  out.reserve(index[0].size());
  for (const auto &[utt, first] : index[0]) {
    Prediction mix;
    mix.utt_id = utt;
    for (std::size_t s = 0; s < systems.size(); ++s) {
      auto it = index[s].find(utt);
      if (it == index[s].end())
        throw InvalidInput("interpolate: utterance " + utt + " missing from system " +
                           std::to_string(s + 1));
      mix.posterior += weights[s] * it->second->posterior;
    }
    mix.predicted_class = argmax_lowest(mix.posterior);
    out.push_back(std::move(mix));
  }
  return out;
}

namespace {

void simplex_grid(int units, std::size_t parts, std::vector<int> &current,
                  const std::function<void(const std::vector<int> &)> &visit) {
  if (current.size() + 1 == parts) {
    current.push_back(units);
    visit(current);
    current.pop_back();
    return;
  }
  for (int u = 0; u <= units; ++u) {
    current.push_back(u);
    simplex_grid(units - u, parts, current, visit);
    current.pop_back();
  }
}

}  // namespace

InterpolationSearch optimize_interpolation(std::span<const PredictionSet> systems,
                                           const std::map<std::string, int> &references,
                                           double step) {
  if (systems.size() < 2) throw InvalidInput("interpolate: optimization needs >= 2 systems");
  if (!(step > 0.0 && step <= 0.5)) throw InvalidInput("interpolate: step must be in (0, 0.5]");
  const double ratio = 1.0 / step;
  const int units = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - units) > 1e-9)
    throw InvalidInput("interpolate: 1/step must be an integer");

  InterpolationSearch best;
  best.uar = -1.0;
  std::vector<int> current;
  simplex_grid(units, systems.size(), current, [&](const std::vector<int> &grid) {
    std::vector<double> w(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) w[k] = static_cast<double>(grid[k]) / units;
    const PredictionSet mixed = interpolate(systems, w);
    std::vector<int> refs, preds;
    for (const auto &p : mixed) {
      auto it = references.find(p.utt_id);
      if (it == references.end())
        throw InvalidInput("interpolate: no reference score for " + p.utt_id);
      refs.push_back(it->second);
      preds.push_back(p.predicted_class);
    }
    const MetricsReport rep = evaluate(refs, preds);
    constexpr double kTie = 1e-12;
    const bool better = rep.uar > best.uar + kTie ||
                        (std::abs(rep.uar - best.uar) <= kTie && rep.mae < best.mae - kTie);
    if (better) best = {w, rep.uar, rep.mae};
  });
  return best;
}

}  // namespace gopctc
