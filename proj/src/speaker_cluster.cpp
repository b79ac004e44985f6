// src/speaker_cluster.cpp

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

#include "gopctc/speaker_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>

#include "gopctc/errors.hpp"
#include "gopctc/kmeans.hpp"

namespace gopctc {

void EmbeddingSet::validate() const {
  if (vectors.rows() < 2) throw InvalidInput("embeddings: need at least 2 embeddings");
  if (static_cast<Eigen::Index>(ids.size()) != vectors.rows())
    throw InvalidInput("embeddings: id count differs from vector count");
  if (!vectors.allFinite()) throw InvalidInput("embeddings: NaN or Inf present");
}

int neighbours_kept(double p, Eigen::Index n) {
  const auto raw = static_cast<Eigen::Index>(std::ceil(p * static_cast<double>(n) - 1e-9));
  return static_cast<int>(std::clamp<Eigen::Index>(raw, 1, std::max<Eigen::Index>(n - 1, 1)));
}

Eigen::MatrixXd build_affinity(const Eigen::MatrixXd &embeddings, double p) {
  const Eigen::Index n = embeddings.rows();
  if (n < 2) throw InvalidInput("affinity: need at least 2 embeddings");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("affinity: p must be in (0, 1]");

  Eigen::MatrixXd x = embeddings.rowwise() - embeddings.colwise().mean();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = x.row(i).norm();
    if (norm > 0.0) x.row(i) /= norm;  // zero rows stay zero: similarity 0
  }
  const Eigen::MatrixXd sim = x * x.transpose();

  const int keep = neighbours_kept(p, n);
  Eigen::MatrixXd pruned = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> cand;
  for (Eigen::Index i = 0; i < n; ++i) {
    cand.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) cand.push_back(j);
    std::partial_sort(cand.begin(), cand.begin() + keep, cand.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return sim(i, a) > sim(i, b) || (sim(i, a) == sim(i, b) && a < b);
                      });
    for (int k = 0; k < keep; ++k) pruned(i, cand[k]) = sim(i, cand[k]);
  }
  Eigen::MatrixXd a = ((pruned + pruned.transpose()) / 2.0).cwiseMax(0.0);
  a.diagonal().setZero();
  return a;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd &affinity) {
  if (affinity.rows() != affinity.cols()) throw InvalidInput("laplacian: matrix is not square");
  if (affinity.size() > 0 && (affinity - affinity.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw InvalidInput("laplacian: affinity matrix is not symmetric");
  Eigen::MatrixXd l = -affinity;
  l.diagonal() = affinity.rowwise().sum() - affinity.diagonal();
  return l;
}

SymmetricEigen<double> eigendecompose_symmetric(const Eigen::MatrixXd &matrix) {
  return jacobi_eigen(matrix);
}

int select_k_eigengap(const Eigen::VectorXd &eigenvalues, int k_min, int k_max) {
  if (k_min < 1 || k_min > k_max || k_max >= eigenvalues.size())
    throw InvalidInput("eigengap: need 1 <= k_min <= k_max < " +
                       std::to_string(eigenvalues.size()) + " (got [" + std::to_string(k_min) +
                       ", " + std::to_string(k_max) + "])");
  int best = k_min;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    const double gap = eigenvalues(k) - eigenvalues(k - 1);
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

ClusterResult cluster(const EmbeddingSet &embeddings, const ClusterConfig &cfg) {
  embeddings.validate();
  const Eigen::Index n = embeddings.vectors.rows();
  if (cfg.k_min < 1 || cfg.k_min > cfg.k_max || cfg.k_max >= n)
    throw InvalidInput("cluster: need 1 <= kmin <= kmax < N = " + std::to_string(n));
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw InvalidInput("cluster: p must be in (0, 1]");
  if (n > kDenseSizeWarning)
    std::cerr << "warning: clustering " << n << " embeddings with a dense O(N^3) eigensolver\n";

  const Eigen::MatrixXd a = build_affinity(embeddings.vectors, cfg.p);
  const SymmetricEigen<double> eig = eigendecompose_symmetric(laplacian(a));

  ClusterResult r;
  r.eigenvalues = eig.eigenvalues;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k)
    r.gaps.push_back(eig.eigenvalues(k) - eig.eigenvalues(k - 1));
  r.k = select_k_eigengap(eig.eigenvalues, cfg.k_min, cfg.k_max);

  KMeansOptions km;
  km.restarts = cfg.kmeans_restarts;
  km.max_iters = cfg.kmeans_max_iters;
  km.seed = cfg.seed;
  r.labels = kmeans(eig.eigenvectors.leftCols(r.k), r.k, km).labels;
  return r;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InvalidInput("ari: partitions differ in size");
  const auto n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, long> joint;
  std::map<int, long> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++ca[a[i]];
    ++cb[b[i]];
  }
  auto pairs = [](long m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto &[key, m] : joint) index += pairs(m);
  for (const auto &[key, m] : ca) sa += pairs(m);
  for (const auto &[key, m] : cb) sb += pairs(m);
  const double expected = sa * sb / (n * (n - 1) / 2.0);
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;  // both trivial partitions
  return (index - expected) / (max_index - expected);
}

}  // namespace gopctc
