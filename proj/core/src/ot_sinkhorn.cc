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

#include "otbary/ot_sinkhorn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "otbary/errors.h"

namespace otbary {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Alternating updates that fail to halve the violation over this many
// iterations are considered stalled and handed to Newton steps.
constexpr size_t kStallWindow = 500;
constexpr size_t kNewtonMaxColumns = 1500;
constexpr size_t kNewtonSteps = 60;

std::vector<double> LogWeights(std::span<const double> w) {
  std::vector<double> out(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    out[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  }
  return out;
}

// Dense problem data shared by the iterations.
struct Kernel {
  size_t m;
  size_t k;
  double eps;
  std::vector<double> cost;  // row-major m x k
  std::vector<double> log_a;
  std::vector<double> log_b;
};

// f_i = -eps log sum_j b_j exp((g_j - c_ij) / eps).
void SourceUpdate(const Kernel& K, const std::vector<double>& g,
                  std::vector<double>& f, std::vector<double>& scratch) {
  scratch.resize(K.k);
  for (size_t i = 0; i < K.m; ++i) {
    const double* c = K.cost.data() + i * K.k;
    double hi = kNegInf;
    for (size_t j = 0; j < K.k; ++j) {
      scratch[j] = K.log_b[j] + (g[j] - c[j]) / K.eps;
      hi = std::max(hi, scratch[j]);
    }
    double s = 0.0;
    for (size_t j = 0; j < K.k; ++j) s += std::exp(scratch[j] - hi);
    f[i] = -K.eps * (hi + std::log(s));
  }
}

// g_j = -eps log sum_i a_i exp((f_i - c_ij) / eps).
void TargetUpdate(const Kernel& K, const std::vector<double>& f,
                  std::vector<double>& g, std::vector<double>& hi,
                  std::vector<double>& acc) {
  hi.assign(K.k, kNegInf);
  acc.assign(K.k, 0.0);
  for (size_t i = 0; i < K.m; ++i) {
    const double* c = K.cost.data() + i * K.k;
    const double base = K.log_a[i] + f[i] / K.eps;
    for (size_t j = 0; j < K.k; ++j) {
      hi[j] = std::max(hi[j], base - c[j] / K.eps);
    }
  }
  for (size_t i = 0; i < K.m; ++i) {
    const double* c = K.cost.data() + i * K.k;
    const double base = K.log_a[i] + f[i] / K.eps;
    for (size_t j = 0; j < K.k; ++j) {
      acc[j] += std::exp(base - c[j] / K.eps - hi[j]);
    }
  }
  for (size_t j = 0; j < K.k; ++j) g[j] = -K.eps * (hi[j] + std::log(acc[j]));
}

// L1 violation of the target marginal for the plan built from (f, g) when
// g_next = T(f); the source marginal is exact after SourceUpdate.
double TargetViolation(const Kernel& K, const std::vector<double>& g,
                       const std::vector<double>& g_next) {
  double err = 0.0;
  for (size_t j = 0; j < K.k; ++j) {
    if (K.log_b[j] == kNegInf) continue;
    err += std::exp(K.log_b[j]) *
           std::abs(std::expm1((g[j] - g_next[j]) / K.eps));
  }
  return err;
}

Kernel MakeKernel(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  const CostSpec& cost, double eps) {
  Kernel K{mu.size(), nu.size(), eps, CostMatrix(mu, nu, cost),
           LogWeights(mu.weights()), LogWeights(nu.weights())};
  return K;
}

// Entropic self-transport value of mu by the averaged symmetric update
// f <- (f + T(f)) / 2. Plain alternating updates stall on self problems
// whose kernel is nearly block diagonal; the symmetric fixed point does not
// have that degenerate direction.
double SymmetricValue(const DiscreteMeasure& mu, const CostSpec& cost,
                      const SinkhornConfig& cfg) {
  const Kernel K = MakeKernel(mu, mu, cost, cfg.epsilon);
  std::vector<double> f(K.m, 0.0);
  std::vector<double> t(K.m);
  std::vector<double> scratch;
  for (size_t iter = 0; iter < cfg.max_iter; ++iter) {
    SourceUpdate(K, f, t, scratch);
    double err = 0.0;
    for (size_t i = 0; i < K.m; ++i) {
      if (mu.weight(i) > 0.0) {
        err += mu.weight(i) * std::abs(std::expm1((f[i] - t[i]) / K.eps));
      }
    }
    if (err <= cfg.tol) {
      double value = 0.0;
      for (size_t i = 0; i < K.m; ++i) {
        if (mu.weight(i) > 0.0) value += mu.weight(i) * (f[i] + t[i]);
      }
      return value - K.eps;
    }
    for (size_t i = 0; i < K.m; ++i) f[i] = 0.5 * (f[i] + t[i]);
  }
  throw SolverError("symmetric sinkhorn did not converge within " +
                    std::to_string(cfg.max_iter) + " iterations");
}

// Column sums of the plan built from (S(g), g), and the row-normalized
// co-occurrence weights M_jl = sum_i p_ij p_il / r_i over the active columns
// when `laplacian` is non-null.
double ColumnViolation(const Kernel& K, const std::vector<double>& g,
                       const std::vector<size_t>& active,
                       std::vector<double>& grad, Eigen::MatrixXd* laplacian) {
  std::vector<double> f(K.m);
  std::vector<double> scratch;
  SourceUpdate(K, g, f, scratch);
  const size_t n = active.size();
  std::vector<double> col(n, 0.0);
  std::vector<double> row(n);
  if (laplacian != nullptr) laplacian->setZero(n, n);
  for (size_t i = 0; i < K.m; ++i) {
    if (K.log_a[i] == kNegInf) continue;
    double r = 0.0;
    for (size_t t = 0; t < n; ++t) {
      const size_t j = active[t];
      row[t] = std::exp(K.log_a[i] + K.log_b[j] +
                        (f[i] + g[j] - K.cost[i * K.k + j]) / K.eps);
      r += row[t];
      col[t] += row[t];
    }
    if (laplacian == nullptr || !(r > 0.0)) continue;
    for (size_t t = 0; t < n; ++t) {
      const double w = row[t] / r;
      for (size_t u = t + 1; u < n; ++u) (*laplacian)(t, u) += w * row[u];
    }
  }
  grad.assign(n, 0.0);
  double err = 0.0;
  for (size_t t = 0; t < n; ++t) {
    grad[t] = std::exp(K.log_b[active[t]]) - col[t];
    err += std::abs(grad[t]);
  }
  if (laplacian != nullptr) {
    Eigen::MatrixXd& L = *laplacian;
    for (size_t t = 0; t < n; ++t) {
      for (size_t u = t + 1; u < n; ++u) {
        L(u, t) = L(t, u);
        L(t, u) = -L(t, u);
        L(u, t) = -L(u, t);
      }
    }
    for (size_t t = 0; t < n; ++t) {
      double d = 0.0;
      for (size_t u = 0; u < n; ++u) {
        if (u != t) d -= L(t, u);
      }
      L(t, t) = d;
    }
  }
  return err;
}

// Newton steps on the semidual g -> <a, S(g)> + <b, g>. Its Hessian is
// -(1/eps) times a graph Laplacian over the columns, assembled from the
// off-diagonal weights so that weakly coupled blocks keep full precision.
// Returns the final column violation.
double NewtonPolish(const Kernel& K, std::vector<double>& g, double tol,
                    size_t& steps) {
  std::vector<size_t> active;
  for (size_t j = 0; j < K.k; ++j) {
    if (K.log_b[j] != kNegInf) active.push_back(j);
  }
  std::vector<double> grad;
  Eigen::MatrixXd L;
  double err = ColumnViolation(K, g, active, grad, &L);
  const size_t n = active.size();
  if (n < 2) return err;
  std::vector<double> trial_grad;
  for (size_t it = 0; it < kNewtonSteps && err > tol; ++it) {
    ++steps;
    Eigen::VectorXd rhs(n - 1);
    for (size_t t = 0; t + 1 < n; ++t) rhs(t) = K.eps * grad[t];
    const Eigen::VectorXd delta =
        L.topLeftCorner(n - 1, n - 1).ldlt().solve(rhs);
    if (!delta.allFinite()) break;
    bool accepted = false;
    for (double step = 1.0; step > 1e-6; step *= 0.5) {
      std::vector<double> trial = g;
      for (size_t t = 0; t + 1 < n; ++t) trial[active[t]] += step * delta(t);
      const double e = ColumnViolation(K, trial, active, trial_grad, nullptr);
      if (e < err) {
        g = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    err = ColumnViolation(K, g, active, grad, &L);
  }
  return err;
}

}  // namespace

void SinkhornConfig::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("sinkhorn epsilon must be positive");
  }
  if (!(tol > 0.0)) throw InputError("sinkhorn tol must be positive");
  if (max_iter == 0) throw InputError("sinkhorn max_iter must be positive");
}

DualPotential SinkhornSolution::NormalizedV() const {
  return DualPotential::Normalized(v, v.size() - 1);
}

SinkhornSolution Sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostSpec& cost, const SinkhornConfig& cfg,
                          std::span<const double> warm_v) {
  cfg.Validate();
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  const Kernel K = MakeKernel(mu, nu, cost, cfg.epsilon);
  if (!warm_v.empty() && warm_v.size() != K.k) {
    throw InputError("warm-start potential has the wrong length");
  }

  std::vector<double> g(K.k, 0.0);
  if (!warm_v.empty()) g.assign(warm_v.begin(), warm_v.end());
  std::vector<double> f(K.m);
  std::vector<double> g_next(K.k);
  std::vector<double> scratch;
  std::vector<double> hi;
  std::vector<double> acc;

  std::vector<double> best_g = g;
  double best_err = std::numeric_limits<double>::infinity();
  size_t iter = 0;
  bool converged = false;
  bool try_newton = K.k <= kNewtonMaxColumns;
  double window_err = std::numeric_limits<double>::infinity();
  auto polish = [&] {
    try_newton = false;
    std::vector<double> trial = best_g;
    size_t steps = 0;
    const double err = NewtonPolish(K, trial, cfg.tol, steps);
    iter += steps;
    if (err < best_err) {
      best_err = err;
      best_g = trial;
    }
    return err <= cfg.tol;
  };
  while (iter < cfg.max_iter) {
    ++iter;
    SourceUpdate(K, g, f, scratch);
    TargetUpdate(K, f, g_next, hi, acc);
    const double err = TargetViolation(K, g, g_next);
    if (err < best_err) {
      best_err = err;
      best_g = g;
    }
    if (err <= cfg.tol) {
      converged = true;
      break;
    }
    if (try_newton && iter % kStallWindow == 0) {
      if (best_err > 0.5 * window_err && polish()) {
        converged = true;
        break;
      }
      window_err = best_err;
    }
    g.swap(g_next);
  }
  if (!converged && try_newton) converged = polish();
  g = best_g;
  SourceUpdate(K, g, f, scratch);

  SinkhornSolution s;
  s.iterations = iter;
  s.converged = converged;
  s.marginal_error = best_err;

  double value = 0.0;
  for (size_t i = 0; i < K.m; ++i) value += mu.weight(i) * f[i];
  for (size_t j = 0; j < K.k; ++j) {
    if (nu.weight(j) > 0.0) value += nu.weight(j) * g[j];
  }
  s.value = value - K.eps;

  std::vector<PlanEntry> entries;
  entries.reserve(K.m * K.k);
  for (size_t i = 0; i < K.m; ++i) {
    for (size_t j = 0; j < K.k; ++j) {
      const double mass = std::exp(K.log_a[i] + K.log_b[j] +
                                   (f[i] + g[j] - K.cost[i * K.k + j]) / K.eps);
      if (mass > 0.0) {
        entries.push_back(
            {static_cast<uint32_t>(i), static_cast<uint32_t>(j), mass});
      }
    }
  }
  s.plan = TransportPlan(
      K.m, K.k, std::move(entries),
      std::vector<double>(mu.weights().begin(), mu.weights().end()),
      std::vector<double>(nu.weights().begin(), nu.weights().end()));
  s.u = std::move(f);
  s.v = std::move(g);
  return s;
}

double SinkhornSemidualValue(const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu,
                             std::span<const double> w,
                             const SinkhornConfig& cfg, const CostSpec& cost) {
  cfg.Validate();
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  if (w.size() != nu.size()) {
    throw InputError("potential has length " + std::to_string(w.size()) +
                     " but the target has " + std::to_string(nu.size()) +
                     " atoms");
  }
  const Kernel K = MakeKernel(mu, nu, cost, cfg.epsilon);
  std::vector<double> g(w.begin(), w.end());
  std::vector<double> f(K.m);
  std::vector<double> scratch;
  SourceUpdate(K, g, f, scratch);
  double value = 0.0;
  for (size_t i = 0; i < K.m; ++i) value += mu.weight(i) * f[i];
  for (size_t j = 0; j < K.k; ++j) {
    if (nu.weight(j) > 0.0) value += nu.weight(j) * w[j];
  }
  return value - K.eps;
}

double DebiasedSinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostSpec& cost, const SinkhornConfig& cfg) {
  cfg.Validate();
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  const double self_mu = SymmetricValue(mu, cost, cfg);
  if (std::ranges::equal(mu.coords(), nu.coords()) &&
      std::ranges::equal(mu.weights(), nu.weights())) {
    return 0.0;
  }
  const SinkhornSolution cross = Sinkhorn(mu, nu, cost, cfg);
  if (!cross.converged) {
    throw SolverError("sinkhorn did not converge within " +
                      std::to_string(cfg.max_iter) + " iterations");
  }
  const double self_nu = SymmetricValue(nu, cost, cfg);
  return cross.value - 0.5 * (self_mu + self_nu);
}

}  // namespace otbary
