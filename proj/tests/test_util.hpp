// tests/test_util.hpp

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

#ifndef GOPCTC_TESTS_TEST_UTIL_HPP_
#define GOPCTC_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "gopctc/ctc.hpp"
#include "gopctc/gop_features.hpp"
#include "gopctc/scorer.hpp"

namespace gopctc::testing {

/// Emissions with the same per-frame probability row at every frame.
inline EmissionMatrix constant_emissions(int frames, std::initializer_list<double> probs) {
  LogMatrix m(frames, static_cast<Eigen::Index>(probs.size()));
  for (int t = 0; t < frames; ++t) {
    int c = 0;
    for (double p : probs) m(t, c++) = std::log(p);
  }
  return EmissionMatrix(std::move(m));
}

/// T=2, C=3 (blank, a, b), every entry 1/3.
inline EmissionMatrix uniform_fixture() { return constant_emissions(2, {1.0 / 3, 1.0 / 3, 1.0 / 3}); }

/// T=2, per-frame probs blank 0.1, a 0.8, b 0.1.
inline EmissionMatrix peaked_fixture() { return constant_emissions(2, {0.1, 0.8, 0.1}); }

/// Random log-softmax rows. `peakiness` scales the Gaussian scores.
inline EmissionMatrix random_emissions(std::mt19937_64 &rng, int frames, int classes,
                                       double peakiness = 2.0) {
  std::normal_distribution<double> n(0.0, peakiness);
  LogMatrix m(frames, classes);
  for (int t = 0; t < frames; ++t)
    for (int c = 0; c < classes; ++c) m(t, c) = n(rng);
  return EmissionMatrix::from_scores(std::move(m));
}

inline LabelSequence random_labels(std::mt19937_64 &rng, int length, int classes) {
  std::uniform_int_distribution<int> d(1, classes - 1);
  LabelSequence l(length);
  for (auto &x : l) x = d(rng);
  return l;
}

inline Vocab letters_vocab(int letters) {
  std::vector<std::string> toks{kBlankToken};
  for (int i = 0; i < letters; ++i) toks.push_back(std::string(1, static_cast<char>('a' + i)));
  return Vocab(toks);
}

/// Synthetic GOP feature sets (vocab_letters >= 5) whose pooled features form 5 separated
/// clusters: class k puts a large value in LPR_del and a class-specific
/// substitution column.
inline std::vector<GopFeatureSet> separable_features(std::mt19937_64 &rng, int per_class,
                                                     std::vector<int> &labels, int vocab_letters = 6,
                                                     double noise = 0.3) {
  std::normal_distribution<double> n(0.0, noise);
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_int_distribution<int> letter(0, vocab_letters - 1);
  std::vector<GopFeatureSet> out;
  labels.clear();
  int counter = 0;
  for (int k = 1; k <= 5; ++k) {
    for (int r = 0; r < per_class; ++r) {
      GopFeatureSet fs;
      char id[32];
      std::snprintf(id, sizeof(id), "utt%05d", counter++);
      fs.utt_id = id;
      const int S = len(rng);
      fs.lpp = -2.0 * k + n(rng);
      fs.lpr_sub = Eigen::MatrixXd::Zero(S, vocab_letters);
      fs.lpr_del = Eigen::VectorXd::Zero(S);
      fs.letter_onehot = Eigen::MatrixXd::Zero(S, vocab_letters);
      for (int i = 0; i < S; ++i) {
        for (int j = 0; j < vocab_letters; ++j) fs.lpr_sub(i, j) = n(rng);
        fs.lpr_sub(i, k - 1) += 4.0;
        fs.lpr_del(i) = 3.0 * k + n(rng);
        fs.letter_onehot(i, letter(rng)) = 1.0;
      }
      out.push_back(std::move(fs));
      labels.push_back(k);
    }
  }
  return out;
}

/// `per_blob` Gaussian points (unit sigma) around each of `blobs` centers
/// placed `spread` apart along distinct axes. Labels are blob indices.
inline Eigen::MatrixXd gaussian_blobs(std::mt19937_64 &rng, int blobs, int per_blob, int dim,
                                      double spread, std::vector<int> &labels) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(blobs * per_blob, dim);
  labels.clear();
  for (int b = 0; b < blobs; ++b) {
    for (int r = 0; r < per_blob; ++r) {
      const int row = b * per_blob + r;
      for (int j = 0; j < dim; ++j) x(row, j) = n(rng);
      x(row, b % dim) += spread;
      labels.push_back(b);
    }
  }
  return x;
}

/// Unique scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("gopctc_test_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gopctc::testing

#endif  // GOPCTC_TESTS_TEST_UTIL_HPP_
