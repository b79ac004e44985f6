// gopctc/gop_features.hpp

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

/**
   Alignment-free goodness-of-pronunciation features.

   For a canonical letter sequence c_1..c_S and frame emissions X:

     LPP           = log P(c | X)
     LPR_sub(i, v) = LPP - log P(c with c_i replaced by v | X)
     LPR_del(i)    = LPP - log P(c with c_i removed | X)

   Every likelihood is a full CTC marginal over all frame paths; no
   frame-to-letter alignment is ever computed. Each letter i gets the vector

     F_i = [LPP, LPR_sub(i, 1..|V|), LPR_del(i), onehot(c_i)]

   of dimension 2|V| + 2. The GOP components are clamped to [-clamp, clamp]
   so that unattainable hypotheses (-inf likelihood) stay finite.

   Two evaluation strategies exist. `kNaive` runs one forward pass per
   hypothesis. `kOptimized` runs one forward and one backward pass over the
   canonical sequence and scores each hypothesis in O(T) from them: prefixes
   before the edited letter keep their alpha values, suffixes after it keep
   their beta values, and only the edited position (with its skip
   transitions re-derived for the new neighbours) is recomputed.
*/

#ifndef GOPCTC_GOP_FEATURES_HPP_
#define GOPCTC_GOP_FEATURES_HPP_

#include <Eigen/Dense>

#include <span>
#include <string>

#include "gopctc/ctc.hpp"

namespace gopctc {

enum class GopMode { kNaive, kOptimized };

constexpr double kDefaultClamp = 50.0;

GopMode parse_gop_mode(const std::string &name);
const char *to_string(GopMode mode);

struct GopFeatureSet {
  std::string utt_id;
  double lpp = 0.0;                // clamped
  Eigen::MatrixXd lpr_sub;         // S x |V|, columns in vocab letter order
  Eigen::VectorXd lpr_del;         // S
  Eigen::MatrixXd letter_onehot;   // S x |V|
  double clamp = kDefaultClamp;

  int num_letters_in_word() const { return static_cast<int>(lpr_sub.rows()); }
  int vocab_letters() const { return static_cast<int>(lpr_sub.cols()); }
  int feature_dim() const { return 2 * vocab_letters() + 2; }

  /// S x (2|V|+2) matrix of per-letter vectors F_i.
  Eigen::MatrixXd feature_matrix() const;
};

/// LPR of a canonical vs. an alternative log-likelihood, clamped. When
/// neither hypothesis is attainable the ratio is 0.
double clamped_ratio(double canonical_ll, double alternative_ll, double clamp);

double compute_lpp(const EmissionMatrix &emissions, std::span<const int> canonical);

/// S x |V| raw log-likelihoods of every single-letter substitution
/// (including the identity substitution).
Eigen::MatrixXd substitution_log_likelihoods(const EmissionMatrix &emissions,
                                             std::span<const int> canonical,
                                             GopMode mode);

/// Length-S raw log-likelihoods of every single-letter deletion.
Eigen::VectorXd deletion_log_likelihoods(const EmissionMatrix &emissions,
                                         std::span<const int> canonical,
                                         GopMode mode);

Eigen::MatrixXd compute_lpr_sub(const EmissionMatrix &emissions,
                                std::span<const int> canonical, GopMode mode,
                                double clamp = kDefaultClamp);

Eigen::VectorXd compute_lpr_del(const EmissionMatrix &emissions,
                                std::span<const int> canonical,
                                GopMode mode = GopMode::kOptimized,
                                double clamp = kDefaultClamp);

GopFeatureSet assemble_features(const std::string &utt_id,
                                const EmissionMatrix &emissions,
                                std::span<const int> canonical, const Vocab &vocab,
                                GopMode mode = GopMode::kOptimized,
                                double clamp = kDefaultClamp);

}  // namespace gopctc

#endif  // GOPCTC_GOP_FEATURES_HPP_
