// tests/test_gop_features.cpp

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

#include <doctest.h>

#include <cmath>
#include <random>

#include "gopctc/errors.hpp"
#include "gopctc/gop_features.hpp"
#include "test_util.hpp"

using namespace gopctc;
using namespace gopctc::testing;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// LPRs computed purely from path enumeration, independent of both trellis
// routes.
struct OracleGop {
  double lpp;
  Eigen::MatrixXd sub;
  Eigen::VectorXd del;
};

OracleGop brute_force_gop(const EmissionMatrix &em, const LabelSequence &canon, double clamp) {
  OracleGop o;
  o.lpp = brute_force_log_likelihood(em, canon);
  const int S = static_cast<int>(canon.size());
  const int V = em.num_classes() - 1;
  o.sub.resize(S, V);
  o.del.resize(S);
  for (int i = 0; i < S; ++i) {
    for (int v = 1; v <= V; ++v) {
      LabelSequence h = canon;
      h[i] = v;
      o.sub(i, v - 1) = v == canon[i] ? 0.0 : clamped_ratio(o.lpp, brute_force_log_likelihood(em, h), clamp);
    }
    LabelSequence h;
    for (int k = 0; k < S; ++k)
      if (k != i) h.push_back(canon[k]);
    o.del(i) = clamped_ratio(o.lpp, brute_force_log_likelihood(em, h), clamp);
  }
  return o;
}

}  // namespace

TEST_CASE("LPP fixtures") {
  CHECK(compute_lpp(peaked_fixture(), LabelSequence{1}) == doctest::Approx(-0.223144).epsilon(1e-6));
  CHECK(compute_lpp(uniform_fixture(), LabelSequence{1}) == doctest::Approx(std::log(1.0 / 3)).epsilon(1e-12));
  CHECK(compute_lpp(constant_emissions(1, {0.1, 0.8, 0.1}), LabelSequence{1, 1}) == -kInf);
  CHECK_THROWS_AS(compute_lpp(peaked_fixture(), LabelSequence{}), InvalidInput);
}

TEST_CASE("LPR substitution fixtures") {
  for (GopMode mode : {GopMode::kNaive, GopMode::kOptimized}) {
    CAPTURE(to_string(mode));
    const auto uni = compute_lpr_sub(uniform_fixture(), LabelSequence{1}, mode);
    CHECK(uni(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    const auto peak = compute_lpr_sub(peaked_fixture(), LabelSequence{1}, mode);
    CHECK(peak(0, 0) == 0.0);
    CHECK(peak(0, 1) == doctest::Approx(3.283414).epsilon(1e-6));
    CHECK(peak(0, 1) == doctest::Approx(std::log(0.8) - std::log(0.03)).epsilon(1e-12));
  }
}

TEST_CASE("LPR deletion fixtures") {
  for (GopMode mode : {GopMode::kNaive, GopMode::kOptimized}) {
    CAPTURE(to_string(mode));
    CHECK(compute_lpr_del(peaked_fixture(), LabelSequence{1}, mode)(0) == doctest::Approx(4.382027).epsilon(1e-6));
    CHECK(compute_lpr_del(uniform_fixture(), LabelSequence{1}, mode)(0) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // LPP = -inf, deleted sequence [a] attainable in one frame.
    const auto del = compute_lpr_del(constant_emissions(1, {0.1, 0.8, 0.1}), LabelSequence{1, 1}, mode, 50.0);
    CHECK(del(0) == -50.0);
    CHECK(del(1) == -50.0);
  }
}

TEST_CASE("clamped_ratio") {
  CHECK(clamped_ratio(-kInf, -kInf, 10.0) == 0.0);
  CHECK(clamped_ratio(-1.0, -kInf, 10.0) == 10.0);
  CHECK(clamped_ratio(-kInf, -1.0, 10.0) == -10.0);
  CHECK(clamped_ratio(-1.0, -3.0, 10.0) == 2.0);
}

TEST_CASE("assembled feature vector for the peaked fixture") {
  const Vocab vocab({"<blank>", "a", "b"});
  const auto fs = assemble_features("u1", peaked_fixture(), LabelSequence{1}, vocab);
  const Eigen::MatrixXd f = fs.feature_matrix();
  REQUIRE(f.rows() == 1);
  REQUIRE(f.cols() == 6);
  const double expected[] = {-0.223144, 0.0, 3.283414, 4.382027, 1.0, 0.0};
  for (int k = 0; k < 6; ++k) CHECK(f(0, k) == doctest::Approx(expected[k]).epsilon(1e-6));
}

TEST_CASE("assemble_features shape and errors") {
  std::mt19937_64 rng(4);
  const Vocab vocab = letters_vocab(5);
  const auto em = random_emissions(rng, 15, 6);
  const LabelSequence canon{1, 3, 3, 5};
  const auto fs = assemble_features("x", em, canon, vocab, GopMode::kOptimized, 20.0);
  CHECK(fs.feature_matrix().rows() == 4);
  CHECK(fs.feature_dim() == 12);
  CHECK((fs.letter_onehot.rowwise().sum().array() == 1.0).all());
  CHECK((fs.lpr_sub.array().abs() <= 20.0).all());
  CHECK((fs.lpr_del.array().abs() <= 20.0).all());
  for (int i = 0; i < 4; ++i) CHECK(fs.lpr_sub(i, canon[i] - 1) == 0.0);

  CHECK_THROWS_AS(assemble_features("x", em, LabelSequence{1}, letters_vocab(4)), InvalidInput);
  CHECK_THROWS_AS(assemble_features("x", em, LabelSequence{1}, vocab, GopMode::kOptimized, 0.0), InvalidInput);
}

TEST_CASE("both GOP routes match path enumeration") {
  std::mt19937_64 rng(123);
  for (int n = 0; n < 150; ++n) {
    const int T = 1 + static_cast<int>(rng() % 6);
    const int C = 2 + static_cast<int>(rng() % 3);
    const int S = 1 + static_cast<int>(rng() % 3);
    const auto em = random_emissions(rng, T, C, 1.5);
    const auto canon = random_labels(rng, S, C);
    const auto oracle = brute_force_gop(em, canon, 50.0);
    for (GopMode mode : {GopMode::kNaive, GopMode::kOptimized}) {
      CAPTURE(to_string(mode));
      const auto sub = compute_lpr_sub(em, canon, mode, 50.0);
      const auto del = compute_lpr_del(em, canon, mode, 50.0);
      CHECK((sub - oracle.sub).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK((del - oracle.del).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("naive and optimized routes agree on larger instances") {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 100; ++n) {
    const int T = 1 + static_cast<int>(rng() % 20);
    const int V = 1 + static_cast<int>(rng() % 8);
    const int S = 1 + static_cast<int>(rng() % 6);
    const auto em = random_emissions(rng, T, V + 1, 3.0);
    LabelSequence canon = random_labels(rng, S, V + 1);
    if (S > 1 && rng() % 3 == 0) canon[1] = canon[0];  // force repeats
    const auto raw_n = substitution_log_likelihoods(em, canon, GopMode::kNaive);
    const auto raw_o = substitution_log_likelihoods(em, canon, GopMode::kOptimized);
    for (Eigen::Index i = 0; i < raw_n.size(); ++i) {
      const double a = raw_n.data()[i], b = raw_o.data()[i];
      CHECK(((a == -kInf && b == -kInf) || std::abs(a - b) <= 1e-6));
    }
    const auto dn = deletion_log_likelihoods(em, canon, GopMode::kNaive);
    const auto dopt = deletion_log_likelihoods(em, canon, GopMode::kOptimized);
    for (Eigen::Index i = 0; i < dn.size(); ++i)
      CHECK(((dn(i) == -kInf && dopt(i) == -kInf) || std::abs(dn(i) - dopt(i)) <= 1e-6));
  }
}

TEST_CASE("GOP mode parsing") {
  CHECK(parse_gop_mode("naive") == GopMode::kNaive);
  CHECK(parse_gop_mode("optimized") == GopMode::kOptimized);
  CHECK_THROWS_AS(parse_gop_mode("fast"), InvalidInput);
}
