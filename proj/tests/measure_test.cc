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
#include <random>

#include <gtest/gtest.h>

#include "otbary/errors.h"
#include "otbary/measure.h"
#include "otbary/measure_io.h"
#include "test_util.h"

namespace otbary {
namespace {

using testing::Atoms1d;

TEST(DiscreteMeasure, UniformTwoAtoms) {
  DiscreteMeasure m = DiscreteMeasure::Create({{0.0}, {1.0}}, {0.5, 0.5});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.dim(), 1u);
  EXPECT_DOUBLE_EQ(m.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(m.weight(1), 0.5);
}

TEST(DiscreteMeasure, RejectsMassOutsideTolerance) {
  EXPECT_THROW(DiscreteMeasure::Create({{0.0}, {1.0}}, {0.5, 0.6}), InputError);
}

TEST(DiscreteMeasure, RejectsNegativeWeight) {
  EXPECT_THROW(DiscreteMeasure::Create({{0.0}, {1.0}}, {1.0, -0.2}), InputError);
}

TEST(DiscreteMeasure, RejectsDimensionMismatchAndEmpty) {
  EXPECT_THROW(DiscreteMeasure::Create({{0.0}, {1.0, 2.0}}, {0.5, 0.5}),
               InputError);
  EXPECT_THROW(DiscreteMeasure::Create({{0.0}}, {0.5, 0.5}), InputError);
  EXPECT_THROW(DiscreteMeasure::Create({}, {}), InputError);
  EXPECT_THROW(DiscreteMeasure::Create({{NAN}}, {1.0}), InputError);
}

TEST(DiscreteMeasure, ClampsTinyNegativeAndRenormalizes) {
  DiscreteMeasure m =
      DiscreteMeasure::Create({{0.0}, {1.0}, {2.0}}, {0.5, 0.5 + 1e-12, -1e-16});
  EXPECT_EQ(m.weight(2), 0.0);
  EXPECT_NEAR(m.weight(0) + m.weight(1) + m.weight(2), 1.0, 1e-15);
}

TEST(Canonicalize, MergesDuplicates) {
  DiscreteMeasure c = Canonicalize(Atoms1d({0.0, 0.0, 1.0}, {0.5, 0.3, 0.2}));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.point(0)[0], 0.0);
  EXPECT_NEAR(c.weight(0), 0.8, 1e-15);
  EXPECT_EQ(c.point(1)[0], 1.0);
  EXPECT_NEAR(c.weight(1), 0.2, 1e-15);
}

TEST(Canonicalize, DropsZeroWeight) {
  DiscreteMeasure c = Canonicalize(Atoms1d({0.0, 1.0}, {1.0, 0.0}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.point(0)[0], 0.0);
  EXPECT_EQ(c.weight(0), 1.0);
}

TEST(Canonicalize, DistinctPositiveIsUnchangedAndIdempotent) {
  std::mt19937_64 rng(3);
  DiscreteMeasure m = testing::RandomMeasure(rng, 20, 3);
  DiscreteMeasure c = Canonicalize(m);
  ASSERT_EQ(c.size(), m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(c.weight(i), m.weight(i));
    for (size_t t = 0; t < 3; ++t) EXPECT_EQ(c.point(i)[t], m.point(i)[t]);
  }
  DiscreteMeasure dup =
      Canonicalize(Atoms1d({0.0, 1.0, 0.0, 2.0, 1.0}, {0.1, 0.2, 0.3, 0.0, 0.4}));
  DiscreteMeasure again = Canonicalize(dup);
  ASSERT_EQ(again.size(), dup.size());
  for (size_t i = 0; i < dup.size(); ++i) {
    EXPECT_EQ(again.weight(i), dup.weight(i));
    EXPECT_EQ(again.point(i)[0], dup.point(i)[0]);
  }
}

TEST(Project, CoordinateProjection) {
  DiscreteMeasure m = DiscreteMeasure::Create({{3.0, 4.0}}, {1.0});
  const double e1[] = {1.0, 0.0};
  DiscreteMeasure p = Project(m, e1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.dim(), 1u);
  EXPECT_EQ(p.point(0)[0], 3.0);
}

TEST(Project, MergesTies) {
  DiscreteMeasure m =
      DiscreteMeasure::Create({{0.0, 1.0}, {0.0, -1.0}}, {0.5, 0.5});
  const double e1[] = {1.0, 0.0};
  DiscreteMeasure p = Project(m, e1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.point(0)[0], 0.0);
  EXPECT_EQ(p.weight(0), 1.0);
}

TEST(Project, Diagonal) {
  DiscreteMeasure m = DiscreteMeasure::Create({{1.0, 1.0}}, {1.0});
  const double theta[] = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  EXPECT_NEAR(Project(m, theta).point(0)[0], std::sqrt(2.0), 1e-15);
}

TEST(Project, RejectsNonUnitDirection) {
  DiscreteMeasure m = DiscreteMeasure::Create({{1.0, 1.0}}, {1.0});
  const double theta[] = {1.0, 1.0};
  EXPECT_THROW(Project(m, theta), InputError);
}

TEST(Project, PreservesMassWithPositiveDistinctAtoms) {
  std::mt19937_64 rng(5);
  DiscreteMeasure m = testing::RandomMeasure(rng, 30, 3);
  const double theta[] = {0.0, 0.6, 0.8};
  DiscreteMeasure p = Project(m, theta);
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    EXPECT_GT(p.weight(i), 0.0);
    s += p.weight(i);
    for (size_t j = 0; j < i; ++j) EXPECT_NE(p.point(i)[0], p.point(j)[0]);
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Radius, Examples) {
  EXPECT_EQ(Radius(DiscreteMeasure::Create({{3.0, 4.0}}, {1.0})), 5.0);
  EXPECT_EQ(Radius(Atoms1d({0.0}, {1.0})), 0.0);
  EXPECT_EQ(Radius(DiscreteMeasure::Create({{1.0, 0.0}, {0.0, -2.0}},
                                           {0.5, 0.5})),
            2.0);
}

TEST(Gaussian, SampleMeanConverges) {
  const size_t d = 3;
  const size_t n = 100000;
  std::vector<double> cov(d * d, 0.0);
  for (size_t i = 0; i < d; ++i) cov[i * d + i] = 1.0;
  GaussianSpec spec = GaussianSpec::Create(Point(d, 0.0), cov);
  std::vector<double> x = SampleGaussianFlat(spec, n, 42);
  for (size_t t = 0; t < d; ++t) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += x[i * d + t];
    mean /= static_cast<double>(n);
    EXPECT_LE(std::abs(mean), 3.0 * std::sqrt(static_cast<double>(d) / n));
  }
}

TEST(Gaussian, DeterministicAndSingleDraw) {
  GaussianSpec spec =
      GaussianSpec::Create({1.0, -1.0}, {2.0, 0.5, 0.5, 1.0});
  EXPECT_EQ(SampleGaussianFlat(spec, 50, 9), SampleGaussianFlat(spec, 50, 9));
  EXPECT_NE(SampleGaussianFlat(spec, 50, 9), SampleGaussianFlat(spec, 50, 10));
  EXPECT_EQ(SampleGaussian(spec, 1, 9).size(), 1u);
}

TEST(Gaussian, RejectsNonSpd) {
  EXPECT_THROW(GaussianSpec::Create({0.0, 0.0}, {1.0, 2.0, 2.0, 1.0}),
               InputError);
  EXPECT_THROW(GaussianSpec::Create({0.0, 0.0}, {1.0, 0.1, 0.0, 1.0}),
               InputError);
}

TEST(MeasureIo, JsonRoundTripIsExact) {
  std::mt19937_64 rng(8);
  DiscreteMeasure m = testing::RandomMeasure(rng, 12, 2);
  DiscreteMeasure r = MeasureFromJson(MeasureToJson(m));
  ASSERT_EQ(r.size(), m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(r.weight(i), m.weight(i));
    EXPECT_EQ(r.point(i)[0], m.point(i)[0]);
    EXPECT_EQ(r.point(i)[1], m.point(i)[1]);
  }
  DiscreteMeasure u = MeasureFromJson(R"({"points": [[0], [1]]})");
  EXPECT_EQ(u.weight(1), 0.5);
  EXPECT_THROW(MeasureFromJson("{\"points\": 3}"), InputError);
  EXPECT_THROW(MeasureFromJson("not json"), InputError);
}

}  // namespace
}  // namespace otbary
