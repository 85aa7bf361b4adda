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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "otbary/errors.h"
#include "otbary/ot_exact.h"
#include "otbary/ot_sliced.h"
#include "test_util.h"

namespace otbary {
namespace {

using testing::RandomMeasure;

const CostSpec kP2 = CostSpec::Create(2.0);

DiscreteMeasure Dirac(double x, double y) {
  return DiscreteMeasure::Create({{x, y}}, {1.0});
}

// Dense angular grid of the projected distance in d = 2.
double GridMaxSliced(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const CostSpec& c, size_t angles) {
  double best = 0.0;
  for (size_t k = 0; k < angles; ++k) {
    const double t = std::numbers::pi * static_cast<double>(k) / angles;
    const double theta[] = {std::cos(t), std::sin(t)};
    best = std::max(best, ProjectedW(a, b, c, theta));
  }
  return best;
}

TEST(DirectionSet, UnitAndDeterministic) {
  DirectionSet s = DirectionSet::MonteCarlo(4, 64);
  std::vector<Point> d = s.Directions(5);
  ASSERT_EQ(d.size(), 64u);
  for (const Point& p : d) {
    double n = 0.0;
    for (double x : p) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-12);
  }
  EXPECT_EQ(d, DirectionSet::MonteCarlo(4, 64).Directions(5));
  EXPECT_THROW(DirectionSet::Fixed({{1.0, 1.0}}), InputError);
  EXPECT_THROW(DirectionSet::Fixed({{1.0, 0.0}}).Directions(3), InputError);
}

TEST(SlicedW, IdenticalMeasuresGiveZero) {
  std::mt19937_64 rng(1);
  DiscreteMeasure m = RandomMeasure(rng, 10, 3);
  SlicedResult r = SlicedW(m, m, kP2, DirectionSet::MonteCarlo(1));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.std_error, 0.0);
}

TEST(SlicedW, TwoDiracsInThePlane) {
  SlicedResult r = SlicedW(Dirac(0, 0), Dirac(1, 0), kP2,
                           DirectionSet::MonteCarlo(7, 2048));
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_LE(std::abs(r.value - 0.5), 3.0 * r.std_error);
  // Deterministic quadrature over the half circle.
  std::vector<Point> grid;
  const size_t k = 100000;
  for (size_t i = 0; i < k; ++i) {
    const double t = std::numbers::pi * (i + 0.5) / k;
    grid.push_back({std::cos(t), std::sin(t)});
  }
  EXPECT_NEAR(
      SlicedW(Dirac(0, 0), Dirac(1, 0), kP2, DirectionSet::Fixed(grid)).value,
      0.5, 1e-9);
}

TEST(SlicedW, BelowExactAndAboveNothing) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 1 + rng() % 15, 3);
    DiscreteMeasure b = RandomMeasure(rng, 1 + rng() % 15, 3);
    SlicedResult s = SlicedW(a, b, kP2, DirectionSet::MonteCarlo(t, 128));
    EXPECT_LE(s.value, SolveDiscreteOt(a, b, kP2).value + 3.0 * s.std_error);
    EXPECT_GE(s.value, 0.0);
  }
}

TEST(SlicedW, DimensionMismatch) {
  DiscreteMeasure a = Dirac(0, 0);
  DiscreteMeasure b = DiscreteMeasure::Create({{0.0}}, {1.0});
  EXPECT_THROW(SlicedW(a, b, kP2, DirectionSet::MonteCarlo(1)), InputError);
}

TEST(MaxSlicedW, TwoDiracs) {
  MaxSlicedResult r = MaxSlicedW(Dirac(0, 0), Dirac(1, 0), kP2);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.theta[0]), 1.0, 1e-6);
}

TEST(MaxSlicedW, IdenticalMeasuresGiveZero) {
  std::mt19937_64 rng(3);
  DiscreteMeasure m = RandomMeasure(rng, 6, 4);
  EXPECT_NEAR(MaxSlicedW(m, m, kP2).value, 0.0, 1e-14);
}

TEST(MaxSlicedW, MatchesAngularGridInThePlane) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 5, 2);
    DiscreteMeasure b = RandomMeasure(rng, 5, 2);
    const double grid = GridMaxSliced(a, b, kP2, 10000);
    const double v = MaxSlicedW(a, b, kP2).value;
    EXPECT_GE(v, grid * (1.0 - 1e-4));
    EXPECT_NEAR(v, grid, 1e-4 * std::max(grid, 1e-12));
  }
}

TEST(MaxSlicedW, AboveSlicedInHigherDimension) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 15; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 1 + rng() % 10, 4);
    DiscreteMeasure b = RandomMeasure(rng, 1 + rng() % 10, 4);
    SlicedResult s = SlicedW(a, b, kP2, DirectionSet::MonteCarlo(t, 128));
    MaxSlicedOptions o;
    o.seed = t;
    EXPECT_GE(MaxSlicedW(a, b, kP2, o).value, s.value - 3.0 * s.std_error);
  }
}

TEST(SlicedW, RotationChangesOnlyMonteCarloNoise) {
  std::mt19937_64 rng(6);
  DiscreteMeasure a = RandomMeasure(rng, 8, 2);
  DiscreteMeasure b = RandomMeasure(rng, 8, 2);
  const double t = 0.7;
  auto rotate = [&](const DiscreteMeasure& m) {
    std::vector<double> x(m.coords().begin(), m.coords().end());
    for (size_t i = 0; i < m.size(); ++i) {
      const double u = x[2 * i];
      const double v = x[2 * i + 1];
      x[2 * i] = std::cos(t) * u - std::sin(t) * v;
      x[2 * i + 1] = std::sin(t) * u + std::cos(t) * v;
    }
    return DiscreteMeasure::FromFlatNoRescale(
        2, x, std::vector<double>(m.weights().begin(), m.weights().end()));
  };
  std::vector<Point> dirs = DirectionSet::MonteCarlo(9, 256).Directions(2);
  std::vector<Point> rotated = dirs;
  for (Point& p : rotated) {
    const double u = p[0];
    const double v = p[1];
    p = {std::cos(t) * u - std::sin(t) * v, std::sin(t) * u + std::cos(t) * v};
  }
  const double plain =
      SlicedW(a, b, kP2, DirectionSet::Fixed(dirs)).value;
  const double turned =
      SlicedW(rotate(a), rotate(b), kP2, DirectionSet::Fixed(rotated)).value;
  EXPECT_NEAR(plain, turned, 1e-9);
  EXPECT_NEAR(MaxSlicedW(a, b, kP2).value,
              MaxSlicedW(rotate(a), rotate(b), kP2).value, 1e-6);
}

}  // namespace
}  // namespace otbary
