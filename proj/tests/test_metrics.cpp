// tests/test_metrics.cpp

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

#include <algorithm>
#include <random>
#include <vector>

#include "gopctc/errors.hpp"
#include "gopctc/metrics.hpp"

using namespace gopctc;

TEST_CASE("hand-computed fixture") {
  const std::vector<int> refs{1, 1, 2}, preds{1, 2, 2};
  const MetricsReport r = evaluate(refs, preds);
  CHECK(r.uar == doctest::Approx(75.0).epsilon(1e-12));
  CHECK(r.f1_macro == doctest::Approx(200.0 / 3).epsilon(1e-12));
  CHECK(r.accuracy == doctest::Approx(200.0 / 3).epsilon(1e-12));
  CHECK(r.mae == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(r.confusion(0, 0) == 1);
  CHECK(r.confusion(0, 1) == 1);
  CHECK(r.confusion(1, 1) == 1);
  CHECK(r.confusion.sum() == 3);
  CHECK(r.support(0) == 2);
  CHECK(r.support(2) == 0);

  const std::string table = format_report_table(r);
  CHECK(table.find("75.0") != std::string::npos);
  CHECK(table.find("66.7") != std::string::npos);
  CHECK(table.find("0.333") != std::string::npos);
}

TEST_CASE("degenerate predictions") {
  const std::vector<int> refs(7, 3), preds(7, 1);
  const MetricsReport r = evaluate(refs, preds);
  CHECK(r.uar == 0.0);
  CHECK(r.accuracy == 0.0);
  CHECK(r.f1_macro == 0.0);
  CHECK(r.mae == doctest::Approx(2.0));
}

TEST_CASE("perfect predictions on random refs") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> refs(1 + rng() % 40);
    for (auto &x : refs) x = 1 + static_cast<int>(rng() % 5);
    const MetricsReport r = evaluate(refs, refs);
    CHECK(r.uar == 100.0);
    CHECK(r.f1_macro == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(r.accuracy == 100.0);
    CHECK(r.mae == 0.0);
  }
}

TEST_CASE("invariance to duplication and permutation, MAE range") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 5 + static_cast<int>(rng() % 30);
    std::vector<int> refs(n), preds(n);
    for (int i = 0; i < n; ++i) {
      refs[i] = 1 + static_cast<int>(rng() % 5);
      preds[i] = 1 + static_cast<int>(rng() % 5);
    }
    const MetricsReport a = evaluate(refs, preds);
    CHECK(a.mae >= 0.0);
    CHECK(a.mae <= 4.0);
    CHECK(a.uar >= 0.0);
    CHECK(a.uar <= 100.0);

    std::vector<int> r2 = refs, p2 = preds;
    r2.insert(r2.end(), refs.begin(), refs.end());
    p2.insert(p2.end(), preds.begin(), preds.end());
    const MetricsReport b = evaluate(r2, p2);
    CHECK(b.uar == doctest::Approx(a.uar).epsilon(1e-12));
    CHECK(b.f1_macro == doctest::Approx(a.f1_macro).epsilon(1e-12));
    CHECK(b.mae == doctest::Approx(a.mae).epsilon(1e-12));

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> r3(n), p3(n);
    for (int i = 0; i < n; ++i) {
      r3[i] = refs[idx[i]];
      p3[i] = preds[idx[i]];
    }
    const MetricsReport c = evaluate(r3, p3);
    CHECK(c.confusion == a.confusion);
    CHECK(c.uar == doctest::Approx(a.uar).epsilon(1e-12));
  }
}

TEST_CASE("metrics errors") {
  const std::vector<int> a{1, 2}, b{1}, bad{0, 6};
  CHECK_THROWS_AS(evaluate(a, b), InvalidInput);
  CHECK_THROWS_AS(evaluate(a, bad), InvalidInput);
  CHECK_THROWS_AS(confusion_matrix(bad, a), InvalidInput);
  CHECK_THROWS_AS(evaluate(std::vector<int>{}, std::vector<int>{}), InvalidInput);
}
