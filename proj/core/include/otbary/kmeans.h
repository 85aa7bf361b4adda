// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OTBARY_KMEANS_H_
#define OTBARY_KMEANS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otbary/measure.h"

namespace otbary {

// Weighted k-means++ seeding over the atoms of m. Returns n distinct atoms,
// or fewer if m has fewer distinct positive-weight atoms.
std::vector<Point> KMeansPlusPlus(const DiscreteMeasure& m, size_t n,
                                  uint64_t seed);

// sum_i w_i min_j |x_i - y_j|^2.
double QuantizationCost(const DiscreteMeasure& m,
                        const std::vector<Point>& centroids);

// Mass of each Voronoi cell of `centroids` under m; equidistant atoms go to
// the lowest index. Throws InputError on duplicate centroids.
std::vector<double> VoronoiWeights(const std::vector<Point>& centroids,
                                   const DiscreteMeasure& m);

struct KMeansResult {
  std::vector<Point> centroids;
  double cost = 0.0;
  size_t iterations = 0;
  // Cost after seeding and after every iteration.
  std::vector<double> cost_trace;
};

// k-means++ seeding then Lloyd iterations on the (weighted) samples. Empty
// clusters are moved to the atom farthest from its centroid. Throws
// InputError unless 1 <= n <= samples.size().
KMeansResult Lloyd(const DiscreteMeasure& samples, size_t n, uint64_t seed,
                   size_t iters = 300);
KMeansResult Lloyd(const std::vector<Point>& samples, size_t n, uint64_t seed,
                   size_t iters = 300);

// Best of `restarts` runs with seeds DeriveSeed(seed, {r}); ties go to the
// lowest r.
KMeansResult LloydBestOf(const DiscreteMeasure& samples, size_t n,
                         uint64_t seed, size_t restarts, size_t iters = 300);

// minimize Y -> W_2^2(mu_n, sum_i weights_i delta_{y_i}): exact transport
// assignment under the mass constraints alternated with plan-weighted
// centroid updates. Same iteration as a one-target free-support barycenter.
KMeansResult ConstrainedKMeans(const std::vector<Point>& samples, size_t n,
                               std::span<const double> weights, uint64_t seed,
                               size_t iters = 300);

}  // namespace otbary

#endif  // OTBARY_KMEANS_H_
