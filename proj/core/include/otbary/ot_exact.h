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

#ifndef OTBARY_OT_EXACT_H_
#define OTBARY_OT_EXACT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "otbary/measure.h"

namespace otbary {

// Ground cost c(x, y) = |x - y|^p.
class CostSpec {
 public:
  // Throws InputError unless p >= 1.
  static CostSpec Create(double p);
  CostSpec() = default;

  double p() const { return p_; }
  double operator()(std::span<const double> x, std::span<const double> y) const;

 private:
  explicit CostSpec(double p) : p_(p) {}
  double p_ = 2.0;
};

// Row-major m x k matrix of c(x_i, y_j).
std::vector<double> CostMatrix(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu, const CostSpec& cost);

struct PlanEntry {
  uint32_t row;
  uint32_t col;
  double mass;
};

// Coupling between a source measure (rows) and a target measure (columns),
// stored as its nonzero entries.
class TransportPlan {
 public:
  TransportPlan() = default;
  TransportPlan(size_t rows, size_t cols, std::vector<PlanEntry> entries,
                std::vector<double> source_weights,
                std::vector<double> target_weights);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  const std::vector<PlanEntry>& entries() const { return entries_; }
  const std::vector<double>& source_weights() const { return source_weights_; }
  const std::vector<double>& target_weights() const { return target_weights_; }

  std::vector<double> RowSums() const;
  std::vector<double> ColSums() const;
  // Largest absolute deviation of a row or column sum from its marginal.
  double MaxMarginalError() const;
  // sum_ij |row/col sum - marginal| over both sides.
  double L1MarginalError() const;
  double MinEntry() const;
  // Row-major m x k copy.
  std::vector<double> ToDense() const;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<PlanEntry> entries_;
  std::vector<double> source_weights_;
  std::vector<double> target_weights_;
};

// Target-side dual vector w, shifted so that w[normalization] == 0.
struct DualPotential {
  std::vector<double> w;
  size_t normalization = 0;

  // Copies raw and subtracts raw[index] from every entry.
  static DualPotential Normalized(std::span<const double> raw, size_t index);
  double SupNorm() const;
};

// A spanning-tree basis of the transportation polytope, as (row, col) cells.
using TransportBasis = std::vector<std::pair<uint32_t, uint32_t>>;

enum class InitialBasis {
  // Greedy in increasing cost order; far fewer pivots when m >> k.
  kLeastCost,
  kNorthwestCorner,
};

enum class ExactMethod {
  // Cell exchange when nu has few atoms relative to mu (m >= 8k, and k <= 16
  // or k <= 64 with warm potentials) and no warm basis is given; network
  // simplex otherwise.
  kAuto,
  kNetworkSimplex,
  // Shortest augmenting paths between the Laguerre cells of nu. Returns no
  // basis.
  kCellExchange,
};

struct ExactOtOptions {
  ExactMethod method = ExactMethod::kAuto;
  // 0 picks a cap proportional to the problem size.
  size_t max_pivots = 0;
  // Optional starting basis from a previous solve with the same atom counts.
  // Used only if it is still primal feasible for the current weights.
  const TransportBasis* warm_start = nullptr;
  InitialBasis initial_basis = InitialBasis::kLeastCost;
  // Target potentials from a previous solve (cell exchange only).
  std::span<const double> warm_potentials;
  // Precomputed CostMatrix(mu, nu, cost); computed when empty.
  std::span<const double> cost_matrix;
};

struct ExactOtResult {
  // W_p^p(mu, nu).
  double value = 0.0;
  TransportPlan plan;
  // Target potentials, normalized so the last entry is 0.
  DualPotential potentials;
  // Source potentials consistent with `potentials`:
  // u_i + w_j <= c_ij with equality on the support of the plan.
  std::vector<double> source_potentials;
  TransportBasis basis;
  size_t pivots = 0;
  bool warm_started = false;
};

// Exact discrete optimal transport. Throws InputError on a dimension mismatch and SolverError if the pivot cap
// is reached.
ExactOtResult SolveDiscreteOt(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const CostSpec& cost,
                              const ExactOtOptions& options = {});

// Kantorovich semi-dual objective at target potentials w:
//   sum_i mu_i min_j (c(x_i, y_j) - w_j) + sum_j nu_j w_j.
// Never exceeds W_p^p(mu, nu); equals it at an optimal w.
double SemidualValue(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     std::span<const double> w, const CostSpec& cost);
double SemidualValue(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const DualPotential& w, const CostSpec& cost);

// Reference value from a dense two-phase tableau simplex over the full
// transportation LP. Shares no code with SolveDiscreteOt; meant for tests on
// instances with m * k <= 64 (throws InputError otherwise).
double BruteForceOt(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const CostSpec& cost);

}  // namespace otbary

#endif  // OTBARY_OT_EXACT_H_
