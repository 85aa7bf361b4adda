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

// Dense two-phase tableau simplex used only as a reference solver.

#include <cmath>
#include <string>
#include <vector>

#include "otbary/errors.h"
#include "otbary/ot_exact.h"

namespace otbary {
namespace {

constexpr double kEps = 1e-12;

// minimize c^T x subject to A x = b, x >= 0, with b >= 0.
class Tableau {
 public:
  Tableau(std::vector<std::vector<double>> a, std::vector<double> b,
          std::vector<double> c)
      : rows_(a.size()), vars_(c.size()), cost_(std::move(c)) {
    // Columns: original variables, then one artificial per row, then rhs.
    cols_ = vars_ + rows_ + 1;
    t_.assign(rows_, std::vector<double>(cols_, 0.0));
    basis_.resize(rows_);
    for (size_t r = 0; r < rows_; ++r) {
      for (size_t j = 0; j < vars_; ++j) t_[r][j] = a[r][j];
      t_[r][vars_ + r] = 1.0;
      t_[r][cols_ - 1] = b[r];
      basis_[r] = vars_ + r;
    }
  }

  double Solve() {
    std::vector<double> phase1(vars_ + rows_, 0.0);
    for (size_t r = 0; r < rows_; ++r) phase1[vars_ + r] = 1.0;
    Optimize(phase1, vars_ + rows_);
    if (Objective(phase1) > 1e-9) throw SolverError("reference LP infeasible");
    DriveOutArtificials();
    Optimize(cost_, vars_);
    return Objective(cost_);
  }

 private:
  // Artificials left basic in redundant rows cost nothing in phase two.
  static double CostOf(const std::vector<double>& c, size_t j) {
    return j < c.size() ? c[j] : 0.0;
  }

  double Objective(const std::vector<double>& c) const {
    double z = 0.0;
    for (size_t r = 0; r < rows_; ++r) z += CostOf(c, basis_[r]) * t_[r][cols_ - 1];
    return z;
  }

  void PivotOn(size_t pr, size_t pc) {
    const double piv = t_[pr][pc];
    for (double& x : t_[pr]) x /= piv;
    for (size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = t_[r][pc];
      if (f == 0.0) continue;
      for (size_t j = 0; j < cols_; ++j) t_[r][j] -= f * t_[pr][j];
    }
    basis_[pr] = pc;
  }

  // Bland's rule over the first `allowed` columns.
  void Optimize(const std::vector<double>& c, size_t allowed) {
    for (;;) {
      size_t enter = allowed;
      for (size_t j = 0; j < allowed; ++j) {
        double reduced = c[j];
        for (size_t r = 0; r < rows_; ++r) reduced -= CostOf(c, basis_[r]) * t_[r][j];
        if (reduced < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return;
      size_t leave = rows_;
      double best = 0.0;
      for (size_t r = 0; r < rows_; ++r) {
        if (t_[r][enter] <= kEps) continue;
        const double ratio = t_[r][cols_ - 1] / t_[r][enter];
        if (leave == rows_ || ratio < best - kEps ||
            (std::abs(ratio - best) <= kEps && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == rows_) throw SolverError("reference LP unbounded");
      PivotOn(leave, enter);
    }
  }

  void DriveOutArtificials() {
    for (size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < vars_) continue;
      for (size_t j = 0; j < vars_; ++j) {
        if (std::abs(t_[r][j]) > 1e-9) {
          PivotOn(r, j);
          break;
        }
      }
      // A row with no usable column is redundant; its artificial stays at 0
      // and is never allowed to enter again.
    }
  }

  size_t rows_;
  size_t vars_;
  size_t cols_;
  std::vector<double> cost_;
  std::vector<std::vector<double>> t_;
  std::vector<size_t> basis_;
};

}  // namespace

double BruteForceOt(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const CostSpec& cost) {
  const size_t m = mu.size();
  const size_t k = nu.size();
  if (m * k > 64) {
    throw InputError("reference solver limited to m * k <= 64, got " +
                     std::to_string(m * k));
  }
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  std::vector<std::vector<double>> a(m + k, std::vector<double>(m * k, 0.0));
  std::vector<double> b(m + k);
  std::vector<double> c(m * k);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < k; ++j) {
      const double d2 = [&] {
        double s = 0.0;
        for (size_t t = 0; t < mu.dim(); ++t) {
          const double z = mu.point(i)[t] - nu.point(j)[t];
          s += z * z;
        }
        return s;
      }();
      c[i * k + j] = std::pow(std::sqrt(d2), cost.p());
      a[i][i * k + j] = 1.0;
      a[m + j][i * k + j] = 1.0;
    }
    b[i] = mu.weight(i);
  }
  for (size_t j = 0; j < k; ++j) b[m + j] = nu.weight(j);
  return Tableau(std::move(a), std::move(b), std::move(c)).Solve();
}

}  // namespace otbary
