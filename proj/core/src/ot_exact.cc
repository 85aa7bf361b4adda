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

#include "otbary/ot_exact.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cell_transport.h"
#include "network_simplex.h"
#include "otbary/errors.h"

namespace otbary {
namespace {

void CheckSameDim(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw InputError("dimension mismatch: " + std::to_string(mu.dim()) +
                     " vs " + std::to_string(nu.dim()));
  }
}

}  // namespace

CostSpec CostSpec::Create(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InputError("cost exponent p must be >= 1, got " + std::to_string(p));
  }
  return CostSpec(p);
}

double CostSpec::operator()(std::span<const double> x,
                            std::span<const double> y) const {
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] - y[k];
    s += t * t;
  }
  if (p_ == 2.0) return s;
  const double r = std::sqrt(s);
  if (p_ == 1.0) return r;
  return std::pow(r, p_);
}

std::vector<double> CostMatrix(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const CostSpec& cost) {
  CheckSameDim(mu, nu);
  const size_t m = mu.size();
  const size_t k = nu.size();
  std::vector<double> c(m * k);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < k; ++j) c[i * k + j] = cost(mu.point(i), nu.point(j));
  }
  return c;
}

TransportPlan::TransportPlan(size_t rows, size_t cols,
                             std::vector<PlanEntry> entries,
                             std::vector<double> source_weights,
                             std::vector<double> target_weights)
    : rows_(rows),
      cols_(cols),
      entries_(std::move(entries)),
      source_weights_(std::move(source_weights)),
      target_weights_(std::move(target_weights)) {}

std::vector<double> TransportPlan::RowSums() const {
  std::vector<double> s(rows_, 0.0);
  for (const PlanEntry& e : entries_) s[e.row] += e.mass;
  return s;
}

std::vector<double> TransportPlan::ColSums() const {
  std::vector<double> s(cols_, 0.0);
  for (const PlanEntry& e : entries_) s[e.col] += e.mass;
  return s;
}

double TransportPlan::MaxMarginalError() const {
  double err = 0.0;
  const auto rs = RowSums();
  const auto cs = ColSums();
  for (size_t i = 0; i < rows_; ++i) {
    err = std::max(err, std::abs(rs[i] - source_weights_[i]));
  }
  for (size_t j = 0; j < cols_; ++j) {
    err = std::max(err, std::abs(cs[j] - target_weights_[j]));
  }
  return err;
}

double TransportPlan::L1MarginalError() const {
  double err = 0.0;
  const auto rs = RowSums();
  const auto cs = ColSums();
  for (size_t i = 0; i < rows_; ++i) err += std::abs(rs[i] - source_weights_[i]);
  for (size_t j = 0; j < cols_; ++j) err += std::abs(cs[j] - target_weights_[j]);
  return err;
}

double TransportPlan::MinEntry() const {
  // Cells not stored are zero.
  double lo = entries_.size() < rows_ * cols_
                  ? 0.0
                  : std::numeric_limits<double>::infinity();
  for (const PlanEntry& e : entries_) lo = std::min(lo, e.mass);
  return lo;
}

std::vector<double> TransportPlan::ToDense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (const PlanEntry& e : entries_) d[e.row * cols_ + e.col] += e.mass;
  return d;
}

DualPotential DualPotential::Normalized(std::span<const double> raw,
                                        size_t index) {
  DualPotential p;
  p.normalization = index;
  const double shift = raw[index];
  p.w.reserve(raw.size());
  for (double x : raw) p.w.push_back(x - shift);
  return p;
}

double DualPotential::SupNorm() const {
  double s = 0.0;
  for (double x : w) s = std::max(s, std::abs(x));
  return s;
}

ExactOtResult SolveDiscreteOt(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const CostSpec& cost,
                              const ExactOtOptions& options) {
  CheckSameDim(mu, nu);
  const size_t m = mu.size();
  const size_t k = nu.size();
  std::vector<double> owned;
  std::span<const double> c = options.cost_matrix;
  if (c.empty()) {
    owned = CostMatrix(mu, nu, cost);
    c = owned;
  } else if (c.size() != m * k) {
    throw InputError("cost matrix has " + std::to_string(c.size()) +
                     " entries, expected " + std::to_string(m * k));
  }
  std::vector<double> source_weights(mu.weights().begin(), mu.weights().end());
  std::vector<double> target_weights(nu.weights().begin(), nu.weights().end());

  ExactMethod method = options.method;
  if (method == ExactMethod::kAuto) {
    const bool warm = options.warm_potentials.size() == k;
    const bool cells = options.warm_start == nullptr && m >= 8 * k &&
                       (k <= 16 || (warm && k <= 64));
    method = cells ? ExactMethod::kCellExchange : ExactMethod::kNetworkSimplex;
  }

  ExactOtResult r;
  if (method == ExactMethod::kCellExchange) {
    internal::CellTransportResult cell = internal::SolveCellTransport(
        mu.weights(), nu.weights(), c, options.warm_potentials);
    r.value = std::max(cell.value, 0.0);
    r.pivots = cell.augmentations;
    r.warm_started = options.warm_potentials.size() == k;
    r.plan = TransportPlan(m, k, std::move(cell.entries),
                           std::move(source_weights), std::move(target_weights));
    r.potentials = DualPotential::Normalized(cell.w, k - 1);
    const double shift = cell.w[k - 1];
    r.source_potentials = std::move(cell.u);
    for (double& u : r.source_potentials) u += shift;
    return r;
  }

  internal::TransportSimplex simplex(mu.weights(), nu.weights(), c);
  const size_t cap = options.max_pivots > 0 ? options.max_pivots
                                            : 1000 * (m + k) + 100000;
  if (!simplex.Solve(cap, options.warm_start, options.initial_basis)) {
    throw SolverError("transportation simplex hit the pivot cap of " +
                      std::to_string(cap) + " (" + std::to_string(m) + "x" +
                      std::to_string(k) + " problem)");
  }

  r.pivots = simplex.pivots();
  r.warm_started = simplex.warm_started();
  std::vector<PlanEntry> entries;
  r.basis.reserve(simplex.num_edges());
  double value = 0.0;
  for (size_t e = 0; e < simplex.num_edges(); ++e) {
    const uint32_t row = simplex.edge_row(e);
    const uint32_t col = simplex.edge_col(e);
    const double f = simplex.edge_flow(e);
    r.basis.emplace_back(row, col);
    if (f > 0.0) {
      entries.push_back({row, col, f});
      value += f * c[row * k + col];
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  r.value = std::max(value, 0.0);
  r.plan = TransportPlan(m, k, std::move(entries), std::move(source_weights),
                         std::move(target_weights));

  std::vector<double> v(k);
  for (size_t j = 0; j < k; ++j) v[j] = simplex.sink_potential(j);
  r.potentials = DualPotential::Normalized(v, k - 1);
  const double shift = v[k - 1];
  r.source_potentials.resize(m);
  for (size_t i = 0; i < m; ++i) {
    r.source_potentials[i] = simplex.source_potential(i) + shift;
  }
  return r;
}

double SemidualValue(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     std::span<const double> w, const CostSpec& cost) {
  CheckSameDim(mu, nu);
  if (w.size() != nu.size()) {
    throw InputError("potential has length " + std::to_string(w.size()) +
                     " but the target has " + std::to_string(nu.size()) +
                     " atoms");
  }
  double total = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < nu.size(); ++j) {
      best = std::min(best, cost(mu.point(i), nu.point(j)) - w[j]);
    }
    total += mu.weight(i) * best;
  }
  for (size_t j = 0; j < nu.size(); ++j) total += nu.weight(j) * w[j];
  return total;
}

double SemidualValue(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const DualPotential& w, const CostSpec& cost) {
  return SemidualValue(mu, nu, w.w, cost);
}

}  // namespace otbary
