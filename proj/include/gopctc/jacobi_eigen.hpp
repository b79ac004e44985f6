// gopctc/jacobi_eigen.hpp

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

#ifndef GOPCTC_JACOBI_EIGEN_HPP_
#define GOPCTC_JACOBI_EIGEN_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gopctc/errors.hpp"

namespace gopctc {

template <typename Scalar>
struct SymmetricEigen {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column k pairs with eigenvalues(k)
  int sweeps = 0;
};

struct JacobiOptions {
  double relative_tolerance = 1e-10;  // on off-diagonal Frobenius norm / ||A||_F
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-9;
};

/// Frobenius norm of the strictly off-diagonal part.
template <typename Derived>
typename Derived::Scalar off_diagonal_norm(const Eigen::MatrixBase<Derived> &a) {
  using Scalar = typename Derived::Scalar;
  Scalar sum = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

/// Cyclic Jacobi eigendecomposition of a dense symmetric matrix. Sweeps over
/// every (p, q) pair, annihilating a_pq with one plane rotation, until the
/// off-diagonal norm drops below tolerance * ||A||_F. Eigenpairs are returned
/// sorted by ascending eigenvalue.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived> &input,
                                                      const JacobiOptions &opts = {}) {
  using Scalar = typename Derived::Scalar;
  using Matrix = typename SymmetricEigen<Scalar>::Matrix;
  using Vector = typename SymmetricEigen<Scalar>::Vector;

  if (input.rows() != input.cols()) throw InvalidInput("eigen: matrix is not square");
  const Eigen::Index n = input.rows();
  Matrix a = input;
  if (!a.allFinite()) throw InvalidInput("eigen: matrix has non-finite entries");
  const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (n > 0 && asym > opts.symmetry_tolerance)
    throw InvalidInput("eigen: matrix is not symmetric (max |A - A^T| = " + std::to_string(asym) + ")");
  a = (a + a.transpose()) / Scalar(2);

  Matrix v = Matrix::Identity(n, n);
  const Scalar threshold = Scalar(opts.relative_tolerance) * a.norm();
  SymmetricEigen<Scalar> out;
  Scalar off = off_diagonal_norm(a);
  Vector colp(n), colq(n);
  while (off > threshold) {
    if (out.sweeps == opts.max_sweeps)
      throw NumericError("eigen: Jacobi did not converge in " + std::to_string(opts.max_sweeps) +
                             " sweeps (off-diagonal norm " + std::to_string(off) + ")",
                         static_cast<double>(off));
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;

        const Scalar app = a(p, p) - t * apq;
        const Scalar aqq = a(q, q) + t * apq;
        colp = c * a.col(p) - s * a.col(q);
        colq = s * a.col(p) + c * a.col(q);
        a.col(p) = colp;
        a.col(q) = colq;
        a.row(p) = colp.transpose();
        a.row(q) = colq.transpose();
        a(p, p) = app;
        a(q, q) = aqq;
        a(p, q) = a(q, p) = Scalar(0);

        colp = c * v.col(p) - s * v.col(q);
        v.col(q) = s * v.col(p) + c * v.col(q);
        v.col(p) = colp;
      }
    }
    ++out.sweeps;
    off = off_diagonal_norm(a);
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

}  // namespace gopctc

#endif  // GOPCTC_JACOBI_EIGEN_HPP_
