// gopctc/log_math.hpp

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

#ifndef GOPCTC_LOG_MATH_HPP_
#define GOPCTC_LOG_MATH_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace gopctc {

template <typename Scalar = double>
constexpr Scalar kLogZero = -std::numeric_limits<Scalar>::infinity();

/// log(exp(a) + exp(b)); exact -inf when both arguments are -inf.
template <typename Scalar>
inline Scalar log_add(Scalar a, Scalar b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero<Scalar>) return a;
  return a + std::log1p(std::exp(b - a));
}

template <typename Scalar>
inline Scalar log_add(Scalar a, Scalar b, Scalar c) {
  return log_add(log_add(a, b), c);
}

/// Log-sum-exp over any dense Eigen expression. Empty or all -inf input
/// yields -inf.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return kLogZero<Scalar>;
  const Scalar m = x.maxCoeff();
  if (m == kLogZero<Scalar>) return m;
  if (std::isinf(m)) return m;  // +inf dominates
  return m + std::log((x.derived().array() - m).exp().sum());
}

/// Row-wise log-softmax, in place.
template <typename Derived>
void log_softmax_rows(Eigen::MatrixBase<Derived> &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto lse = log_sum_exp(m.row(r));
    m.row(r).array() -= lse;
  }
}

/// Softmax of a logit vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::MatrixBase<Derived> &logits) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  Vec p = (logits.array() - logits.maxCoeff()).exp().matrix();
  p /= p.sum();
  return p;
}

}  // namespace gopctc

#endif  // GOPCTC_LOG_MATH_HPP_
