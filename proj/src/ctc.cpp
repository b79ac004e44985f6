// src/ctc.cpp

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

#include "gopctc/ctc.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gopctc/errors.hpp"
#include "gopctc/log_math.hpp"

namespace gopctc {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kBlankToken)
    throw InvalidInput("vocab: first token must be " + kBlankToken);
  if (tokens_.size() < 2)
    throw InvalidInput("vocab: needs at least one letter besides the blank");
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    const auto &tok = tokens_[i];
    if (tok.empty())
      throw InvalidInput("vocab: empty token at line " + std::to_string(i));
    if (!index_.emplace(tok, i).second)
      throw InvalidInput("vocab: duplicate token '" + tok + "' at line " +
                         std::to_string(i));
  }
}

int Vocab::find(const std::string &token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

std::string Vocab::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto &tok : tokens_) {
    for (unsigned char c : tok) mix(c);
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EmissionMatrix::EmissionMatrix(LogMatrix values) : values_(std::move(values)) {
  if (values_.rows() > 0 && values_.cols() < 2)
    throw ValidationError("emissions: need at least 2 classes (blank + 1)");
  int worst_row = -1;
  double worst_dev = 0.0;
  for (Eigen::Index t = 0; t < values_.rows(); ++t) {
    const auto row = values_.row(t);
    if (row.array().isNaN().any())
      throw ValidationError("emissions: NaN at frame " + std::to_string(t));
    if (row.maxCoeff() > kNormTolerance)
      throw ValidationError("emissions: value above 0 at frame " + std::to_string(t) +
                            " (not log-probabilities?)");
    const double dev = std::abs(log_sum_exp(row));
    if (!(dev <= worst_dev)) {
      worst_dev = dev;
      worst_row = static_cast<int>(t);
    }
  }
  if (worst_dev > kNormTolerance) {
    std::ostringstream os;
    os << "emissions: frame " << worst_row << " is not normalized (|logsumexp| = "
       << worst_dev << " > " << kNormTolerance << ")";
    throw ValidationError(os.str());
  }
}

EmissionMatrix EmissionMatrix::from_scores(LogMatrix scores) {
  log_softmax_rows(scores);
  return EmissionMatrix(std::move(scores));
}

std::vector<int> extended_sequence(std::span<const int> labels) {
  std::vector<int> z(2 * labels.size() + 1, kBlank);
  for (std::size_t i = 0; i < labels.size(); ++i) z[2 * i + 1] = labels[i];
  return z;
}

int min_frames_required(std::span<const int> labels) {
  int n = static_cast<int>(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

namespace {

void check_inputs(const EmissionMatrix &emissions, std::span<const int> labels) {
  if (emissions.num_frames() == 0)
    throw InvalidInput("ctc: emission matrix has no frames");
  const int c = emissions.num_classes();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] <= kBlank || labels[i] >= c)
      throw InvalidInput("ctc: label " + std::to_string(labels[i]) + " at position " +
                         std::to_string(i) + " outside [1, " + std::to_string(c - 1) + "]");
  }
}

}  // namespace

LogMatrix ctc_forward_trellis(const EmissionMatrix &emissions,
                              std::span<const int> labels) {
  check_inputs(emissions, labels);
  const auto z = extended_sequence(labels);
  const int T = emissions.num_frames();
  const int L = static_cast<int>(z.size());
  const LogMatrix &x = emissions.values();

  LogMatrix alpha = LogMatrix::Constant(T, L, kLogZero<>);
  alpha(0, 0) = x(0, z[0]);
  if (L > 1) alpha(0, 1) = x(0, z[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < L; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (s >= 2 && z[s] != kBlank && z[s] != z[s - 2])
        acc = log_add(acc, alpha(t - 1, s - 2));
      alpha(t, s) = acc == kLogZero<> ? acc : acc + x(t, z[s]);
    }
  }
  return alpha;
}

LogMatrix ctc_backward_trellis(const EmissionMatrix &emissions,
                               std::span<const int> labels) {
  check_inputs(emissions, labels);
  const auto z = extended_sequence(labels);
  const int T = emissions.num_frames();
  const int L = static_cast<int>(z.size());
  const LogMatrix &x = emissions.values();

  LogMatrix beta = LogMatrix::Constant(T, L, kLogZero<>);
  beta(T - 1, L - 1) = x(T - 1, z[L - 1]);
  if (L > 1) beta(T - 1, L - 2) = x(T - 1, z[L - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (int s = L - 1; s >= 0; --s) {
      double acc = beta(t + 1, s);
      if (s + 1 < L) acc = log_add(acc, beta(t + 1, s + 1));
      if (s + 2 < L && z[s] != kBlank && z[s] != z[s + 2])
        acc = log_add(acc, beta(t + 1, s + 2));
      beta(t, s) = acc == kLogZero<> ? acc : acc + x(t, z[s]);
    }
  }
  return beta;
}

double ctc_log_likelihood(const EmissionMatrix &emissions,
                          std::span<const int> labels) {
  check_inputs(emissions, labels);
  if (labels.empty()) return emissions.values().col(kBlank).sum();
  if (min_frames_required(labels) > emissions.num_frames()) return kLogZero<>;
  const LogMatrix alpha = ctc_forward_trellis(emissions, labels);
  const auto last = alpha.row(alpha.rows() - 1);
  const Eigen::Index L = alpha.cols();
  return log_add(last(L - 1), last(L - 2));
}

LabelSequence collapse_path(std::span<const int> path) {
  LabelSequence out;
  int prev = -1;
  for (int sym : path) {
    if (sym != prev && sym != kBlank) out.push_back(sym);
    prev = sym;
  }
  return out;
}

double brute_force_log_likelihood(const EmissionMatrix &emissions,
                                  std::span<const int> labels) {
  check_inputs(emissions, labels);
  const int T = emissions.num_frames();
  const int C = emissions.num_classes();
  std::uint64_t paths = 1;
  for (int t = 0; t < T; ++t) {
    paths *= static_cast<std::uint64_t>(C);
    if (paths > kBruteForceMaxPaths)
      throw SizeError("brute force: C^T exceeds " + std::to_string(kBruteForceMaxPaths));
  }
  const LabelSequence target(labels.begin(), labels.end());
  std::vector<int> path(T, 0);
  std::vector<double> matches;
  for (std::uint64_t n = 0; n < paths; ++n) {
    if (collapse_path(path) == target) {
      double lp = 0.0;
      for (int t = 0; t < T; ++t) lp += emissions(t, path[t]);
      matches.push_back(lp);
    }
    for (int t = T - 1; t >= 0; --t) {  // odometer increment
      if (++path[t] < C) break;
      path[t] = 0;
    }
  }
  return log_sum_exp(Eigen::Map<const Eigen::VectorXd>(matches.data(),
                                                       static_cast<Eigen::Index>(matches.size())));
}

}  // namespace gopctc
