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

#ifndef OTBARY_BARYCENTER_H_
#define OTBARY_BARYCENTER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "otbary/divergence.h"
#include "otbary/measure.h"

namespace otbary {

// At most n support points, positions and weights free.
struct SparseConstraint {
  size_t n = 1;
};
// Weights fixed, positions free.
struct FreeSupportConstraint {
  std::vector<double> weights;
};
// Positions fixed, weights free.
struct FixedSupportConstraint {
  std::vector<Point> support;
};
using BarycenterConstraint =
    std::variant<SparseConstraint, FreeSupportConstraint, FixedSupportConstraint>;

struct BarycenterOptions {
  size_t max_outer = 200;
  // Stop when |cost change| <= rel_tol * max(|cost|, 1e-300).
  double rel_tol = 1e-7;
  // Projected subgradient iterations of a standalone weight solve.
  size_t weight_iters = 500;
  // Weight iterations per block-coordinate round inside SolveSparse.
  size_t sparse_weight_iters = 25;
  size_t restarts = 5;
  // Per-target weights lambda; empty means uniform 1/L.
  std::vector<double> target_weights;
};

struct BarycenterSolution {
  std::vector<Point> support;
  std::vector<double> weights;
  double cost = 0.0;
  size_t iterations = 0;
  // Cost after initialization and after every accepted step.
  std::vector<double> cost_trace;
  bool converged = false;
  // Averaged normalized target potential at the returned weights (exact and
  // entropic kinds); empty otherwise.
  std::vector<double> weight_gradient;

  DiscreteMeasure ToMeasure() const;
};

// (1 / L) sum_l D(mu^l, nu), or the lambda-weighted mean if given.
double BaryCost(const std::vector<DiscreteMeasure>& targets,
                const DiscreteMeasure& nu, const DivergenceSpec& spec,
                std::span<const double> target_weights = {});

// Weights on a fixed support. Kinds: wasserstein, sinkhorn. Starts from
// `initial_weights` (uniform if empty) and returns the best iterate.
BarycenterSolution SolveFixedSupport(
    const std::vector<DiscreteMeasure>& targets,
    const std::vector<Point>& support, const DivergenceSpec& spec,
    const BarycenterOptions& options = {},
    std::span<const double> initial_weights = {});

// Positions with fixed weights, starting from `init` (one point per weight).
// Kinds with p = 2: wasserstein, sinkhorn, sliced (experimental).
BarycenterSolution SolveFreeSupport(const std::vector<DiscreteMeasure>& targets,
                                    std::span<const double> weights,
                                    const DivergenceSpec& spec,
                                    std::vector<Point> init,
                                    const BarycenterOptions& options = {});

// Joint positions and weights, at most n atoms, best of options.restarts
// k-means++ initializations. Kinds with p = 2: wasserstein, sinkhorn.
BarycenterSolution SolveSparse(const std::vector<DiscreteMeasure>& targets,
                               size_t n, const DivergenceSpec& spec,
                               uint64_t seed,
                               const BarycenterOptions& options = {});

// Sparse alternation started from an existing solution, e.g. one fitted on
// another sample of the same targets.
BarycenterSolution RefineSparse(const std::vector<DiscreteMeasure>& targets,
                                const BarycenterSolution& start,
                                const DivergenceSpec& spec,
                                const BarycenterOptions& options = {});

// Dispatches on the constraint. Free-support runs start from k-means++.
BarycenterSolution SolveBarycenter(const std::vector<DiscreteMeasure>& targets,
                                   const BarycenterConstraint& constraint,
                                   const DivergenceSpec& spec, uint64_t seed,
                                   const BarycenterOptions& options = {});

// Measure JSON plus "cost" and "trace".
std::string BarycenterToJson(const BarycenterSolution& solution);

// Euclidean projection onto the probability simplex.
std::vector<double> ProjectToSimplex(std::span<const double> v);

}  // namespace otbary

#endif  // OTBARY_BARYCENTER_H_
