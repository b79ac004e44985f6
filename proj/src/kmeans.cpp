// src/kmeans.cpp

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

#include "gopctc/kmeans.hpp"

#include <limits>
#include <random>

#include "gopctc/errors.hpp"

namespace gopctc {

namespace {

// Uniform double in [0, 1) from the raw engine output; std distributions are
// implementation-defined and would break cross-platform reproducibility.
double unit_uniform(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::Index uniform_index(std::mt19937_64 &rng, Eigen::Index n) {
  return std::min<Eigen::Index>(static_cast<Eigen::Index>(unit_uniform(rng) * n), n - 1);
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd &x, int k, std::mt19937_64 &rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  centers.row(0) = x.row(uniform_index(rng, n));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = unit_uniform(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, n);
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd &x, Eigen::MatrixXd centers, int max_iters) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult r;
  r.labels.assign(n, -1);
  Eigen::VectorXd dist(n);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      dist(i) = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (r.labels[i] != static_cast<int>(best)) {
        r.labels[i] = static_cast<int>(best);
        changed = true;
      }
    }
    r.iterations = it + 1;
    if (!changed && it > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[i]) += x.row(i);
      ++counts(r.labels[i]);
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) {
        centers.row(c) = sums.row(c) / counts(c);
      } else {
        // Empty cluster: move it onto the worst-fitting point.
        Eigen::Index far;
        dist.maxCoeff(&far);
        centers.row(c) = x.row(far);
        dist(far) = 0.0;
      }
    }
  }
  r.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    r.inertia += (x.row(i) - centers.row(r.labels[i])).squaredNorm();
  r.centers = std::move(centers);
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd &points, int k, const KMeansOptions &opts) {
  if (k < 1 || k > points.rows())
    throw InvalidInput("kmeans: k = " + std::to_string(k) + " must be in [1, " +
                       std::to_string(points.rows()) + "]");
  if (opts.restarts < 1 || opts.max_iters < 1)
    throw InvalidInput("kmeans: restarts and max_iters must be >= 1");
  if (!points.allFinite()) throw InvalidInput("kmeans: non-finite input");

  std::mt19937_64 rng(opts.seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    KMeansResult cand = lloyd(points, seed_plus_plus(points, k, rng), opts.max_iters);
    if (cand.inertia < best.inertia) best = std::move(cand);
  }

  std::vector<int> remap(k, -1);
  int next = 0;
  for (int &l : best.labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  Eigen::MatrixXd centers(k, points.cols());
  for (int c = 0; c < k; ++c) {
    const int to = remap[c] >= 0 ? remap[c] : next++;
    centers.row(to) = best.centers.row(c);
  }
  best.centers = std::move(centers);
  return best;
}

}  // namespace gopctc
