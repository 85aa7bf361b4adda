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

#include "otbary/kmeans.h"

#include <algorithm>
#include <limits>
#include <string>

#include "otbary/barycenter.h"
#include "otbary/errors.h"
#include "otbary/random.h"

namespace otbary {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index drawn with probability proportional to mass[i].
size_t SampleIndex(Rng& rng, const std::vector<double>& mass, double total) {
  const double u = Uniform01(rng) * total;
  double acc = 0.0;
  size_t last = 0;
  for (size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    acc += mass[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

struct Assignment {
  std::vector<uint32_t> label;
  std::vector<double> dist;  // squared distance to the assigned centroid
};

Assignment Assign(const DiscreteMeasure& m, const std::vector<Point>& c) {
  Assignment a;
  a.label.resize(m.size());
  a.dist.resize(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    uint32_t arg = 0;
    for (size_t j = 0; j < c.size(); ++j) {
      const double d = SquaredDistance(m.point(i), c[j]);
      if (d < best) {
        best = d;
        arg = static_cast<uint32_t>(j);
      }
    }
    a.label[i] = arg;
    a.dist[i] = best;
  }
  return a;
}

double CostOf(const DiscreteMeasure& m, const Assignment& a) {
  double s = 0.0;
  for (size_t i = 0; i < m.size(); ++i) s += m.weight(i) * a.dist[i];
  return s;
}

}  // namespace

std::vector<Point> KMeansPlusPlus(const DiscreteMeasure& m, size_t n,
                                  uint64_t seed) {
  if (n == 0) throw InputError("number of centroids must be positive");
  Rng rng = MakeRng(seed);
  std::vector<Point> centers;
  std::vector<double> mass(m.weights().begin(), m.weights().end());
  const size_t first = SampleIndex(rng, mass, 1.0);
  centers.emplace_back(m.point(first).begin(), m.point(first).end());

  std::vector<double> d2(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    d2[i] = SquaredDistance(m.point(i), centers.back());
  }
  while (centers.size() < n) {
    double total = 0.0;
    for (size_t i = 0; i < m.size(); ++i) {
      mass[i] = m.weight(i) * d2[i];
      total += mass[i];
    }
    if (!(total > 0.0)) break;
    const size_t pick = SampleIndex(rng, mass, total);
    centers.emplace_back(m.point(pick).begin(), m.point(pick).end());
    for (size_t i = 0; i < m.size(); ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(m.point(i), centers.back()));
    }
  }
  return centers;
}

double QuantizationCost(const DiscreteMeasure& m,
                        const std::vector<Point>& centroids) {
  if (centroids.empty()) throw InputError("no centroids");
  return CostOf(m, Assign(m, centroids));
}

std::vector<double> VoronoiWeights(const std::vector<Point>& centroids,
                                   const DiscreteMeasure& m) {
  if (centroids.empty()) throw InputError("no centroids");
  for (const Point& c : centroids) {
    if (c.size() != m.dim()) throw InputError("centroid dimension mismatch");
  }
  for (size_t a = 0; a < centroids.size(); ++a) {
    for (size_t b = a + 1; b < centroids.size(); ++b) {
      if (centroids[a] == centroids[b]) {
        throw InputError("duplicate centroid at index " + std::to_string(b));
      }
    }
  }
  const Assignment a = Assign(m, centroids);
  std::vector<double> w(centroids.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i) w[a.label[i]] += m.weight(i);
  return w;
}

KMeansResult Lloyd(const DiscreteMeasure& samples, size_t n, uint64_t seed,
                   size_t iters) {
  if (n == 0 || n > samples.size()) {
    throw InputError("need 1 <= centroids <= " +
                     std::to_string(samples.size()) + ", got " +
                     std::to_string(n));
  }
  KMeansResult r;
  r.centroids = KMeansPlusPlus(samples, n, seed);
  const size_t k = r.centroids.size();
  const size_t dim = samples.dim();
  Assignment a = Assign(samples, r.centroids);
  r.cost_trace.push_back(CostOf(samples, a));

  for (size_t it = 0; it < iters; ++it) {
    std::vector<double> mass(k, 0.0);
    std::vector<Point> sum(k, Point(dim, 0.0));
    for (size_t i = 0; i < samples.size(); ++i) {
      const uint32_t j = a.label[i];
      mass[j] += samples.weight(i);
      const auto x = samples.point(i);
      for (size_t t = 0; t < dim; ++t) sum[j][t] += samples.weight(i) * x[t];
    }
    for (size_t j = 0; j < k; ++j) {
      if (mass[j] > 0.0) {
        for (size_t t = 0; t < dim; ++t) r.centroids[j][t] = sum[j][t] / mass[j];
        continue;
      }
      const size_t far = static_cast<size_t>(
          std::max_element(a.dist.begin(), a.dist.end()) - a.dist.begin());
      r.centroids[j].assign(samples.point(far).begin(),
                            samples.point(far).end());
      a.dist[far] = 0.0;
    }
    Assignment next = Assign(samples, r.centroids);
    r.iterations = it + 1;
    r.cost_trace.push_back(CostOf(samples, next));
    const bool stable = next.label == a.label;
    a = std::move(next);
    if (stable) break;
  }
  r.cost = r.cost_trace.back();
  return r;
}

KMeansResult Lloyd(const std::vector<Point>& samples, size_t n, uint64_t seed,
                   size_t iters) {
  return Lloyd(DiscreteMeasure::Uniform(samples), n, seed, iters);
}

KMeansResult LloydBestOf(const DiscreteMeasure& samples, size_t n,
                         uint64_t seed, size_t restarts, size_t iters) {
  if (restarts == 0) throw InputError("restarts must be >= 1");
  KMeansResult best;
  for (size_t r = 0; r < restarts; ++r) {
    KMeansResult run = Lloyd(samples, n, DeriveSeed(seed, {r}), iters);
    if (r == 0 || run.cost < best.cost) best = std::move(run);
  }
  return best;
}

KMeansResult ConstrainedKMeans(const std::vector<Point>& samples, size_t n,
                               std::span<const double> weights, uint64_t seed,
                               size_t iters) {
  if (weights.size() != n) {
    throw InputError("got " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(n) + " centroids");
  }
  const std::vector<DiscreteMeasure> targets{DiscreteMeasure::Uniform(samples)};
  std::vector<Point> init = KMeansPlusPlus(targets.front(), n, seed);
  while (init.size() < n) init.push_back(init.back());
  BarycenterOptions options;
  options.max_outer = iters;
  const BarycenterSolution s = SolveFreeSupport(
      targets, weights, DivergenceSpec::Wasserstein(2.0), std::move(init),
      options);
  KMeansResult r;
  r.centroids = s.support;
  r.cost = s.cost;
  r.iterations = s.iterations;
  r.cost_trace = s.cost_trace;
  return r;
}

}  // namespace otbary
