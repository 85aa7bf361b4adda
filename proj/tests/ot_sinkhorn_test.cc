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
#include "otbary/ot_exact.h"
#include "otbary/ot_sinkhorn.h"
#include "test_util.h"

namespace otbary {
namespace {

using testing::Atoms1d;
using testing::RandomMeasure;
using testing::Uniform1d;

const CostSpec kP2 = CostSpec::Create(2.0);

SinkhornConfig Eps(double eps, double tol = 1e-9) {
  SinkhornConfig c;
  c.epsilon = eps;
  c.tol = tol;
  return c;
}

TEST(SinkhornConfig, Validation) {
  EXPECT_THROW(Eps(0.0).Validate(), InputError);
  EXPECT_THROW(Eps(1.0, -1.0).Validate(), InputError);
  SinkhornConfig c;
  c.max_iter = 0;
  EXPECT_THROW(c.Validate(), InputError);
}

TEST(Sinkhorn, PointMasses) {
  for (double eps : {0.1, 0.5, 1.0}) {
    SinkhornSolution s =
        Sinkhorn(Uniform1d({0.0}), Uniform1d({1.0}), kP2, Eps(eps));
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.value, 1.0 - eps, 1e-9);
  }
}

TEST(Sinkhorn, SamePointMass) {
  for (double eps : {0.01, 1.0, 7.0}) {
    EXPECT_NEAR(
        Sinkhorn(Uniform1d({0.0}), Uniform1d({0.0}), kP2, Eps(eps)).value, -eps,
        1e-12);
  }
}

TEST(Sinkhorn, LargeEpsilonTwoPoints) {
  // Symmetric 2 x 2 problem: the optimal plan puts a on the diagonal with
  // log(a / (1/2 - a)) = 1 / eps.
  const double eps = 100.0;
  SinkhornSolution s = Sinkhorn(Uniform1d({0.0, 1.0}), Uniform1d({0.0, 1.0}),
                                kP2, Eps(eps, 1e-12));
  const double a = 0.5 / (1.0 + std::exp(-1.0 / eps));
  const double b = 0.5 - a;
  const double oracle = 2.0 * b + eps * (2.0 * a * (std::log(a / 0.25) - 1.0) +
                                         2.0 * b * (std::log(b / 0.25) - 1.0));
  EXPECT_NEAR(s.value, oracle, 1e-9);
  // Close to the product coupling value 0.5 - eps, and below it.
  EXPECT_LT(s.value, 0.5 - eps);
  EXPECT_NEAR(s.value, 0.5 - eps, 2e-3);
}

TEST(Sinkhorn, MarginalsAndSemidual) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 1 + rng() % 20, 2);
    DiscreteMeasure b = RandomMeasure(rng, 1 + rng() % 20, 2);
    SinkhornConfig cfg = Eps(t % 2 ? 0.1 : 1.0, 1e-6);
    SinkhornSolution s = Sinkhorn(a, b, kP2, cfg);
    ASSERT_TRUE(s.converged);
    EXPECT_LE(s.marginal_error, 1e-6);
    EXPECT_LE(s.plan.L1MarginalError(), 1e-6);
    EXPECT_NEAR(SinkhornSemidualValue(a, b, s.v, cfg, kP2), s.value,
                10.0 * cfg.tol);
    std::vector<double> shifted = s.v;
    for (double& x : shifted) x += 3.25;
    EXPECT_NEAR(SinkhornSemidualValue(a, b, shifted, cfg, kP2),
                SinkhornSemidualValue(a, b, s.v, cfg, kP2), 1e-10);
  }
}

TEST(SinkhornSemidualValue, SingleTargetAtom) {
  const double w[] = {4.0};
  EXPECT_NEAR(SinkhornSemidualValue(Uniform1d({0.0}), Uniform1d({1.0}), w,
                                    Eps(0.3), kP2),
              0.7, 1e-12);
}

TEST(SinkhornSemidualValue, LengthMismatch) {
  const double w[] = {0.0, 0.0};
  EXPECT_THROW(SinkhornSemidualValue(Uniform1d({0.0}), Uniform1d({1.0}), w,
                                     Eps(1.0), kP2),
               InputError);
}

TEST(Sinkhorn, ApproachesExactTransport) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 1 + rng() % 20, 2);
    DiscreteMeasure b = RandomMeasure(rng, 1 + rng() % 20, 2);
    SinkhornConfig cfg = Eps(1e-3, 1e-6);
    cfg.max_iter = 1000000;
    EXPECT_NEAR(Sinkhorn(a, b, kP2, cfg).value,
                SolveDiscreteOt(a, b, kP2).value, 5e-2);
  }
}

TEST(Sinkhorn, DualBound) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 1 + rng() % 15, 2);
    DiscreteMeasure b = RandomMeasure(rng, 1 + rng() % 15, 2);
    const double p = t % 2 ? 1.0 : 2.0;
    const double r = std::max(Radius(a), Radius(b));
    SinkhornSolution s = Sinkhorn(a, b, CostSpec::Create(p), Eps(0.5, 1e-8));
    ASSERT_TRUE(s.converged);
    EXPECT_LE(s.NormalizedV().SupNorm(), 4.0 * p * std::pow(2.0 * r, p) + 1e-4);
  }
}

TEST(Sinkhorn, IterationCapIsReported) {
  std::mt19937_64 rng(4);
  DiscreteMeasure a = RandomMeasure(rng, 20, 2);
  DiscreteMeasure b = RandomMeasure(rng, 20, 2);
  SinkhornConfig cfg = Eps(0.01, 1e-12);
  cfg.max_iter = 2;
  SinkhornSolution s = Sinkhorn(a, b, kP2, cfg);
  EXPECT_FALSE(s.converged);
  EXPECT_GT(s.marginal_error, cfg.tol);
}

TEST(Sinkhorn, WarmStartReachesSameValue) {
  std::mt19937_64 rng(5);
  DiscreteMeasure a = RandomMeasure(rng, 30, 2);
  DiscreteMeasure b = RandomMeasure(rng, 12, 2);
  SinkhornSolution cold = Sinkhorn(a, b, kP2, Eps(0.2));
  SinkhornSolution warm = Sinkhorn(a, b, kP2, Eps(0.2), cold.v);
  EXPECT_NEAR(warm.value, cold.value, 1e-9);
  EXPECT_LE(warm.iterations, cold.iterations);
}

TEST(Sinkhorn, WeaklyCoupledAtomsConverge) {
  // Far-apart atoms make the kernel nearly block diagonal.
  DiscreteMeasure a = Atoms1d({0.0, 4.0, 9.0}, {0.2, 0.3, 0.5});
  DiscreteMeasure b = Atoms1d({9.0, 4.0, 0.0}, {0.5, 0.3, 0.2});
  SinkhornSolution s = Sinkhorn(a, b, kP2, Eps(0.5, 1e-12));
  ASSERT_TRUE(s.converged);
  EXPECT_LE(s.plan.L1MarginalError(), 1e-10);
  EXPECT_NEAR(DebiasedSinkhorn(a, b, kP2, Eps(0.5, 1e-12)), 0.0, 1e-9);
}

TEST(DebiasedSinkhorn, Properties) {
  EXPECT_NEAR(DebiasedSinkhorn(Uniform1d({0.0}), Uniform1d({1.0}), kP2, Eps(0.5)),
              1.0, 1e-9);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, 1 + rng() % 12, 2);
    DiscreteMeasure b = RandomMeasure(rng, 1 + rng() % 12, 2);
    EXPECT_NEAR(DebiasedSinkhorn(a, a, kP2, Eps(0.5)), 0.0, 1e-8);
    EXPECT_NEAR(DebiasedSinkhorn(a, b, kP2, Eps(0.5)),
                DebiasedSinkhorn(b, a, kP2, Eps(0.5)), 1e-9);
  }
}

}  // namespace
}  // namespace otbary
