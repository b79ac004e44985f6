// src/gop_features.cpp

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

#include "gopctc/gop_features.hpp"

#include <algorithm>
#include <cmath>

#include "gopctc/errors.hpp"
#include "gopctc/log_math.hpp"

namespace gopctc {

GopMode parse_gop_mode(const std::string &name) {
  if (name == "naive") return GopMode::kNaive;
  if (name == "optimized") return GopMode::kOptimized;
  throw InvalidInput("unknown GOP mode '" + name + "' (expected naive|optimized)");
}

const char *to_string(GopMode mode) {
  return mode == GopMode::kNaive ? "naive" : "optimized";
}

Eigen::MatrixXd GopFeatureSet::feature_matrix() const {
  const int S = num_letters_in_word();
  const int V = vocab_letters();
  Eigen::MatrixXd f(S, 2 * V + 2);
  f.col(0).setConstant(lpp);
  f.middleCols(1, V) = lpr_sub;
  f.col(V + 1) = lpr_del;
  f.rightCols(V) = letter_onehot;
  return f;
}

double clamped_ratio(double canonical_ll, double alternative_ll, double clamp) {
  if (canonical_ll == kLogZero<> && alternative_ll == kLogZero<>) return 0.0;
  return std::clamp(canonical_ll - alternative_ll, -clamp, clamp);
}

double compute_lpp(const EmissionMatrix &emissions, std::span<const int> canonical) {
  if (canonical.empty()) throw InvalidInput("gop: canonical sequence is empty");
  return ctc_log_likelihood(emissions, canonical);
}

namespace {

Eigen::MatrixXd naive_substitutions(const EmissionMatrix &emissions,
                                    std::span<const int> canonical) {
  const int S = static_cast<int>(canonical.size());
  const int C = emissions.num_classes();
  Eigen::MatrixXd ll(S, C - 1);
  LabelSequence hyp(canonical.begin(), canonical.end());
  for (int i = 0; i < S; ++i) {
    for (int v = 1; v < C; ++v) {
      hyp[i] = v;
      ll(i, v - 1) = ctc_log_likelihood(emissions, hyp);
    }
    hyp[i] = canonical[i];
  }
  return ll;
}

// Each path of the substituted sequence occupies the edited letter p for a
// contiguous run of frames. Splitting on the last frame of that run, the
// prefix is a forward value at p (recomputed, since the emission there
// changes) and the suffix is an untouched canonical backward value.
Eigen::MatrixXd shared_trellis_substitutions(const EmissionMatrix &emissions,
                                             std::span<const int> canonical) {
  const int S = static_cast<int>(canonical.size());
  const int C = emissions.num_classes();
  const int T = emissions.num_frames();
  const LogMatrix &x = emissions.values();
  const LogMatrix alpha = ctc_forward_trellis(emissions, canonical);
  const LogMatrix beta = ctc_backward_trellis(emissions, canonical);

  Eigen::MatrixXd ll(S, C - 1);
  Eigen::VectorXd run(C);    // forward value at p, per candidate letter
  Eigen::VectorXd total(C);
  for (int i = 0; i < S; ++i) {
    const int p = 2 * i + 1;
    const int prev = i > 0 ? canonical[i - 1] : -1;
    const int next = i + 1 < S ? canonical[i + 1] : -1;
    const bool last_letter = i + 1 == S;

    run.setConstant(kLogZero<>);
    total.setConstant(kLogZero<>);
    for (int t = 0; t < T; ++t) {
      const double from_blank = t > 0 ? alpha(t - 1, p - 1) : kLogZero<>;
      const double from_prev = (t > 0 && p >= 2) ? alpha(t - 1, p - 2) : kLogZero<>;
      const double exit_blank = t + 1 < T ? beta(t + 1, p + 1) : kLogZero<>;
      const double exit_next = (t + 1 < T && !last_letter) ? beta(t + 1, p + 2) : kLogZero<>;
      for (int v = 1; v < C; ++v) {
        double in;
        if (t == 0) {
          in = p == 1 ? 0.0 : kLogZero<>;
        } else {
          in = log_add(run(v), from_blank, v != prev ? from_prev : kLogZero<>);
        }
        run(v) = in == kLogZero<> ? in : in + x(t, v);
        double out = log_add(exit_blank, v != next ? exit_next : kLogZero<>);
        if (last_letter && t + 1 == T) out = 0.0;
        total(v) = log_add(total(v), run(v) + out);
      }
    }
    ll.row(i) = total.tail(C - 1).transpose();
  }
  return ll;
}

// The deleted sequence shares the canonical prefix up to the blank before c_i
// and the canonical suffix from the blank after c_i. Splitting each path on
// its first frame at c_{i+1} combines canonical alpha and beta directly.
Eigen::VectorXd shared_trellis_deletions(const EmissionMatrix &emissions,
                                         std::span<const int> canonical) {
  const int S = static_cast<int>(canonical.size());
  const int T = emissions.num_frames();
  const LogMatrix alpha = ctc_forward_trellis(emissions, canonical);
  const LogMatrix beta = ctc_backward_trellis(emissions, canonical);

  Eigen::VectorXd ll(S);
  for (int i = 0; i < S; ++i) {
    const int p = 2 * i + 1;
    if (i + 1 == S) {
      ll(i) = log_add(alpha(T - 1, p - 1), p >= 2 ? alpha(T - 1, p - 2) : kLogZero<>);
      continue;
    }
    const int n = p + 2;
    const bool skip = i > 0 && canonical[i - 1] != canonical[i + 1];
    double total = i == 0 ? beta(0, n) : kLogZero<>;
    for (int t = 0; t + 1 < T; ++t) {
      total = log_add(total, alpha(t, p - 1) + beta(t + 1, n));
      if (skip) total = log_add(total, alpha(t, p - 2) + beta(t + 1, n));
    }
    ll(i) = total;
  }
  return ll;
}

}  // namespace

Eigen::MatrixXd substitution_log_likelihoods(const EmissionMatrix &emissions,
                                             std::span<const int> canonical,
                                             GopMode mode) {
  if (canonical.empty()) throw InvalidInput("gop: canonical sequence is empty");
  return mode == GopMode::kNaive ? naive_substitutions(emissions, canonical)
                                 : shared_trellis_substitutions(emissions, canonical);
}

Eigen::VectorXd deletion_log_likelihoods(const EmissionMatrix &emissions,
                                         std::span<const int> canonical,
                                         GopMode mode) {
  if (canonical.empty()) throw InvalidInput("gop: canonical sequence is empty");
  if (mode == GopMode::kOptimized) return shared_trellis_deletions(emissions, canonical);
  const int S = static_cast<int>(canonical.size());
  Eigen::VectorXd ll(S);
  LabelSequence hyp;
  for (int i = 0; i < S; ++i) {
    hyp.clear();
    for (int k = 0; k < S; ++k)
      if (k != i) hyp.push_back(canonical[k]);
    ll(i) = ctc_log_likelihood(emissions, hyp);
  }
  return ll;
}

Eigen::MatrixXd compute_lpr_sub(const EmissionMatrix &emissions,
                                std::span<const int> canonical, GopMode mode,
                                double clamp) {
  const double lpp = compute_lpp(emissions, canonical);
  const Eigen::MatrixXd ll = substitution_log_likelihoods(emissions, canonical, mode);
  Eigen::MatrixXd lpr = ll.unaryExpr([&](double alt) { return clamped_ratio(lpp, alt, clamp); });
  for (int i = 0; i < static_cast<int>(canonical.size()); ++i)
    lpr(i, canonical[i] - 1) = 0.0;
  return lpr;
}

Eigen::VectorXd compute_lpr_del(const EmissionMatrix &emissions,
                                std::span<const int> canonical, GopMode mode,
                                double clamp) {
  const double lpp = compute_lpp(emissions, canonical);
  return deletion_log_likelihoods(emissions, canonical, mode)
      .unaryExpr([&](double alt) { return clamped_ratio(lpp, alt, clamp); });
}

GopFeatureSet assemble_features(const std::string &utt_id,
                                const EmissionMatrix &emissions,
                                std::span<const int> canonical, const Vocab &vocab,
                                GopMode mode, double clamp) {
  if (!(clamp > 0.0) || !std::isfinite(clamp))
    throw InvalidInput("gop: clamp must be a positive finite number");
  if (emissions.num_classes() != vocab.num_classes())
    throw InvalidInput("gop: " + utt_id + ": emissions have " +
                       std::to_string(emissions.num_classes()) + " classes, vocab has " +
                       std::to_string(vocab.num_classes()));
  for (int c : canonical)
    if (c <= kBlank || c >= vocab.num_classes())
      throw VocabularyError("gop: " + utt_id + ": label index " + std::to_string(c) +
                            " not a vocab letter");

  const int S = static_cast<int>(canonical.size());
  const int V = vocab.num_letters();
  GopFeatureSet fs;
  fs.utt_id = utt_id;
  fs.clamp = clamp;
  const double lpp = compute_lpp(emissions, canonical);
  fs.lpp = std::clamp(lpp, -clamp, clamp);

  const Eigen::MatrixXd sub = substitution_log_likelihoods(emissions, canonical, mode);
  const Eigen::VectorXd del = deletion_log_likelihoods(emissions, canonical, mode);
  fs.lpr_sub = sub.unaryExpr([&](double alt) { return clamped_ratio(lpp, alt, clamp); });
  fs.lpr_del = del.unaryExpr([&](double alt) { return clamped_ratio(lpp, alt, clamp); });
  fs.letter_onehot = Eigen::MatrixXd::Zero(S, V);
  for (int i = 0; i < S; ++i) {
    fs.lpr_sub(i, canonical[i] - 1) = 0.0;
    fs.letter_onehot(i, canonical[i] - 1) = 1.0;
  }
  return fs;
}

}  // namespace gopctc
