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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "otbary/errors.h"
#include "otbary/kmeans.h"
#include "otbary/ot_exact.h"
#include "test_util.h"

namespace otbary {
namespace {

using testing::RandomMeasure;
using testing::Uniform1d;

const CostSpec kP2 = CostSpec::Create(2.0);

std::vector<Point> Points1d(std::vector<double> x) {
  std::vector<Point> p;
  for (double v : x) p.push_back({v});
  return p;
}

std::vector<double> Sorted1d(const std::vector<Point>& c) {
  std::vector<double> x;
  for (const Point& p : c) x.push_back(p[0]);
  std::sort(x.begin(), x.end());
  return x;
}

TEST(Lloyd, TwoPointsTwoCentroids) {
  KMeansResult r = Lloyd(Points1d({0.0, 1.0}), 2, 1);
  EXPECT_EQ(Sorted1d(r.centroids), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(r.cost, 0.0);
}

TEST(Lloyd, FourPointsBestOfTen) {
  KMeansResult r = LloydBestOf(Uniform1d({0.0, 1.0, 2.0, 3.0}), 2, 1, 10);
  std::vector<double> c = Sorted1d(r.centroids);
  EXPECT_NEAR(c[0], 0.5, 1e-12);
  EXPECT_NEAR(c[1], 2.5, 1e-12);
  EXPECT_NEAR(r.cost, 0.25, 1e-9);
}

TEST(Lloyd, AsManyCentroidsAsSamples) {
  std::mt19937_64 rng(1);
  DiscreteMeasure m = RandomMeasure(rng, 17, 3, 1.0, true);
  EXPECT_LE(Lloyd(m, 17, 4).cost, 1e-24);
}

TEST(Lloyd, CostTraceNonIncreasing) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    DiscreteMeasure m = RandomMeasure(rng, 200, 2, 1.0, true);
    KMeansResult r = Lloyd(m, 8, t);
    for (size_t i = 1; i < r.cost_trace.size(); ++i) {
      EXPECT_LE(r.cost_trace[i], r.cost_trace[i - 1] + 1e-12);
    }
    EXPECT_NEAR(r.cost, QuantizationCost(m, r.centroids), 1e-12);
  }
}

TEST(Lloyd, RejectsTooManyCentroids) {
  EXPECT_THROW(Lloyd(Points1d({0.0, 1.0}), 3, 1), InputError);
  EXPECT_THROW(Lloyd(Points1d({0.0, 1.0}), 0, 1), InputError);
}

TEST(VoronoiWeights, Examples) {
  EXPECT_EQ(VoronoiWeights(Points1d({0.0, 10.0}), Uniform1d({-1.0, 1.0})),
            (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(VoronoiWeights(Points1d({0.0, 1.0}), Uniform1d({0.0, 1.0})),
            (std::vector<double>{0.5, 0.5}));
  // Equidistant samples go to the lowest index.
  EXPECT_EQ(VoronoiWeights(Points1d({0.0, 2.0}), Uniform1d({1.0})),
            (std::vector<double>{1.0, 0.0}));
  EXPECT_THROW(VoronoiWeights(Points1d({1.0, 1.0}), Uniform1d({0.0})),
               InputError);
}

TEST(VoronoiWeights, OptimalWeightsEqualQuantizationCost) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    DiscreteMeasure m = RandomMeasure(rng, 5 + rng() % 40, 2, 1.0, true);
    DiscreteMeasure y = RandomMeasure(rng, 1 + rng() % 6, 2);
    std::vector<Point> centroids = y.points();
    const double q = QuantizationCost(m, centroids);
    std::vector<double> pi = VoronoiWeights(centroids, m);
    const double w = SolveDiscreteOt(
        m, DiscreteMeasure::FromFlatNoRescale(
               2, std::vector<double>(y.coords().begin(), y.coords().end()),
               pi),
        kP2).value;
    EXPECT_NEAR(w, q, 1e-9);
    for (int s = 0; s < 20; ++s) {
      std::vector<double> other(pi.size());
      double total = 0.0;
      for (double& x : other) total += (x = unit(rng) + 1e-3);
      for (double& x : other) x /= total;
      DiscreteMeasure nu = DiscreteMeasure::FromFlat(
          2, std::vector<double>(y.coords().begin(), y.coords().end()), other);
      EXPECT_GE(SolveDiscreteOt(m, nu, kP2).value, q - 1e-9);
    }
  }
}

TEST(ConstrainedKMeans, SymmetricSplit) {
  const std::vector<double> w = {0.5, 0.5};
  KMeansResult r = ConstrainedKMeans(Points1d({0.0, 1.0, 2.0, 3.0}), 2, w, 1);
  std::vector<double> c = Sorted1d(r.centroids);
  EXPECT_NEAR(c[0], 0.5, 1e-12);
  EXPECT_NEAR(c[1], 2.5, 1e-12);
  EXPECT_NEAR(r.cost, 0.25, 1e-12);
}

TEST(ConstrainedKMeans, SingleEffectiveCentroid) {
  std::mt19937_64 rng(4);
  DiscreteMeasure m = RandomMeasure(rng, 25, 2, 1.0, true);
  const std::vector<double> w = {1.0, 0.0, 0.0};
  KMeansResult r = ConstrainedKMeans(m.points(), 3, w, 2);
  Point mean(2, 0.0);
  for (size_t i = 0; i < m.size(); ++i) {
    mean[0] += m.point(i)[0] / 25.0;
    mean[1] += m.point(i)[1] / 25.0;
  }
  EXPECT_NEAR(r.centroids[0][0], mean[0], 1e-12);
  EXPECT_NEAR(r.centroids[0][1], mean[1], 1e-12);
  EXPECT_NEAR(r.cost, QuantizationCost(m, {mean}), 1e-12);
}

TEST(ConstrainedKMeans, NeverBelowUnconstrainedCost) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int t = 0; t < 10; ++t) {
    DiscreteMeasure m = RandomMeasure(rng, 60, 2, 1.0, true);
    std::vector<double> w(4);
    double total = 0.0;
    for (double& x : w) total += (x = unit(rng));
    for (double& x : w) x /= total;
    KMeansResult c = ConstrainedKMeans(m.points(), 4, w, t);
    // Voronoi masses are the best weights for any fixed centroids.
    EXPECT_GE(c.cost, QuantizationCost(m, c.centroids) - 1e-12);
    for (size_t i = 1; i < c.cost_trace.size(); ++i) {
      EXPECT_LE(c.cost_trace[i], c.cost_trace[i - 1] + 1e-9);
    }
  }
}

}  // namespace
}  // namespace otbary
