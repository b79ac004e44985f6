// gopctc/ctc.hpp

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

#ifndef GOPCTC_CTC_HPP_
#define GOPCTC_CTC_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gopctc {

/// Dense row-major matrix of log-probabilities; one row per frame.
using LogMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Canonical letter indices into the vocabulary, blank-free.
using LabelSequence = std::vector<int>;

constexpr int kBlank = 0;
inline const std::string kBlankToken = "<blank>";

/// Letter inventory of the acoustic model. Index 0 is always the blank.
class Vocab {
 public:
  /// `tokens[0]` must be "<blank>"; the rest are the letters in emission
  /// column order.
  explicit Vocab(std::vector<std::string> tokens);

  int num_classes() const { return static_cast<int>(tokens_.size()); }
  int num_letters() const { return num_classes() - 1; }
  const std::vector<std::string> &tokens() const { return tokens_; }
  const std::string &token(int index) const { return tokens_.at(index); }

  /// Index of `token`, or -1.
  int find(const std::string &token) const;

  /// FNV-1a 64-bit hash over the token list, hex encoded.
  std::string fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// T x C frame-level log-probabilities over blank plus letters.
class EmissionMatrix {
 public:
  static constexpr double kNormTolerance = 1e-3;

  EmissionMatrix() = default;

  /// Takes already-normalized log-probabilities and validates them:
  /// every row must log-sum-exp to 0 within kNormTolerance and no entry may
  /// exceed +kNormTolerance. Throws ValidationError naming the worst row.
  explicit EmissionMatrix(LogMatrix values);

  /// Applies a per-row log-softmax to arbitrary scores first.
  static EmissionMatrix from_scores(LogMatrix scores);

  int num_frames() const { return static_cast<int>(values_.rows()); }
  int num_classes() const { return static_cast<int>(values_.cols()); }
  const LogMatrix &values() const { return values_; }
  double operator()(int t, int c) const { return values_(t, c); }

 private:
  LogMatrix values_;
};

/// Blank-interleaved sequence of length 2S+1: blank, c_1, blank, ..., c_S,
/// blank.
std::vector<int> extended_sequence(std::span<const int> labels);

/// Minimum number of frames a path needs to collapse to `labels`.
int min_frames_required(std::span<const int> labels);

/// log P_CTC(labels | emissions) by the forward recursion. Returns -inf when
/// the sequence cannot be produced in T frames.
double ctc_log_likelihood(const EmissionMatrix &emissions,
                          std::span<const int> labels);

/// Forward trellis alpha, T x (2S+1), log domain. alpha(t, s) includes the
/// emission of frame t.
LogMatrix ctc_forward_trellis(const EmissionMatrix &emissions,
                              std::span<const int> labels);

/// Backward trellis beta, T x (2S+1), log domain. beta(t, s) is the
/// probability of frames t..T-1 given state s at frame t, emission of frame
/// t included, so alpha + beta - emission recombines to the likelihood at
/// every frame.
LogMatrix ctc_backward_trellis(const EmissionMatrix &emissions,
                               std::span<const int> labels);

/// Enumerates all C^T frame paths. Test oracle only; throws SizeError when
/// C^T exceeds kBruteForceMaxPaths.
constexpr std::uint64_t kBruteForceMaxPaths = 10'000'000;
double brute_force_log_likelihood(const EmissionMatrix &emissions,
                                  std::span<const int> labels);

/// Blank removal and repeat merging.
LabelSequence collapse_path(std::span<const int> path);

}  // namespace gopctc

#endif  // GOPCTC_CTC_HPP_
