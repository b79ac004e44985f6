// gopctc/kmeans.hpp

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

#ifndef GOPCTC_KMEANS_HPP_
#define GOPCTC_KMEANS_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace gopctc {

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 100;
  std::uint64_t seed = 42;
};

struct KMeansResult {
  std::vector<int> labels;     // one per row, in [0, k)
  Eigen::MatrixXd centers;     // k x d
  double inertia = 0.0;        // sum of squared distances to assigned center
  int iterations = 0;          // of the winning restart
};

/// Lloyd's algorithm on the rows of `points` with k-means++ seeding; the
/// restart with the lowest inertia wins. Labels are renumbered in order of
/// first appearance. Deterministic for a fixed seed on every platform.
KMeansResult kmeans(const Eigen::MatrixXd &points, int k, const KMeansOptions &opts = {});

}  // namespace gopctc

#endif  // GOPCTC_KMEANS_HPP_
