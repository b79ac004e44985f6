// gopctc/speaker_cluster.hpp

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
   Speaker pseudo-labels by spectral clustering of utterance embeddings:

     1. subtract the global mean embedding;
     2. cosine similarity, keeping the ceil(p * N) largest off-diagonal
        entries of each row (at least one);
     3. A = (S + S^T) / 2 with negatives clamped to 0 and a zero diagonal;
     4. unnormalized Laplacian L = D - A, dense Jacobi eigendecomposition;
     5. K = argmax_{k in [k_min, k_max]} (lambda_{k+1} - lambda_k);
     6. k-means++ on the rows of the first K eigenvectors.
*/

#ifndef GOPCTC_SPEAKER_CLUSTER_HPP_
#define GOPCTC_SPEAKER_CLUSTER_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gopctc/jacobi_eigen.hpp"

namespace gopctc {

struct EmbeddingSet {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors;  // N x d, one embedding per row

  /// N >= 2, ids match rows, all values finite.
  void validate() const;
};

struct ClusterConfig {
  double p = 0.01;
  int k_min = 40;
  int k_max = 45;
  int kmeans_restarts = 10;
  int kmeans_max_iters = 100;
  std::uint64_t seed = 42;
};

struct ClusterResult {
  std::vector<int> labels;       // in [0, K)
  int k = 0;
  Eigen::VectorXd eigenvalues;   // ascending
  std::vector<double> gaps;      // gaps[j] = lambda_{k+1} - lambda_k for k = k_min + j
};

/// Above this many embeddings the dense solver is slow; cluster() warns.
constexpr Eigen::Index kDenseSizeWarning = 3000;

/// Number of neighbours kept per row for pruning parameter p.
int neighbours_kept(double p, Eigen::Index n);

Eigen::MatrixXd build_affinity(const Eigen::MatrixXd &embeddings, double p);

/// L = D - A. Throws InvalidInput when A is asymmetric beyond 1e-9.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd &affinity);

SymmetricEigen<double> eigendecompose_symmetric(const Eigen::MatrixXd &matrix);

/// k_min and k_max are 1-based cluster counts; needs k_max < eigenvalues.size().
int select_k_eigengap(const Eigen::VectorXd &eigenvalues, int k_min, int k_max);

ClusterResult cluster(const EmbeddingSet &embeddings, const ClusterConfig &cfg);

/// Chance-corrected agreement between two partitions of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace gopctc

#endif  // GOPCTC_SPEAKER_CLUSTER_HPP_
