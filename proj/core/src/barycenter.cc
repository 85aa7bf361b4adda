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

#include "otbary/barycenter.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "json.hpp"
#include "otbary/errors.h"
#include "otbary/kmeans.h"
#include "otbary/ot_1d.h"
#include "otbary/parallel.h"
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

size_t CheckTargets(const std::vector<DiscreteMeasure>& targets) {
  if (targets.empty()) throw InputError("barycenter needs at least one target");
  const size_t dim = targets.front().dim();
  for (const DiscreteMeasure& t : targets) {
    if (t.dim() != dim) throw InputError("targets have mixed dimensions");
  }
  return dim;
}

std::vector<double> TargetLambda(size_t count, std::span<const double> given) {
  if (given.empty()) {
    return std::vector<double>(count, 1.0 / static_cast<double>(count));
  }
  if (given.size() != count) {
    throw InputError("need one target weight per target");
  }
  double total = 0.0;
  for (double w : given) {
    if (!(w >= 0.0)) throw InputError("target weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError("target weights must sum to one");
  }
  return std::vector<double>(given.begin(), given.end());
}

DiscreteMeasure MakeMeasure(const std::vector<Point>& support,
                            std::span<const double> weights) {
  const size_t dim = support.front().size();
  std::vector<double> coords;
  coords.reserve(dim * support.size());
  for (const Point& y : support) coords.insert(coords.end(), y.begin(), y.end());
  return DiscreteMeasure::FromFlatNoRescale(
      dim, std::move(coords), std::vector<double>(weights.begin(), weights.end()));
}

void RequireP2(const DivergenceSpec& spec, const char* what) {
  if (spec.cost().p() != 2.0) {
    throw InputError(std::string(what) + " requires p = 2");
  }
}

bool IsTransportKind(DivergenceKind k) {
  return k == DivergenceKind::kWasserstein || k == DivergenceKind::kSinkhorn;
}

// Cell masses of the nearest support point, ties to the lowest index.
std::vector<double> NearestMasses(const std::vector<Point>& support,
                                  const DiscreteMeasure& m) {
  std::vector<double> w(support.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    size_t arg = 0;
    for (size_t j = 0; j < support.size(); ++j) {
      const double d = SquaredDistance(m.point(i), support[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    w[arg] += m.weight(i);
  }
  return w;
}

struct TargetState {
  double value = 0.0;
  TransportPlan plan;
  // Normalized target potential (last entry zero).
  std::vector<double> potential;
  TransportBasis basis;
  std::vector<double> v;
};

// Solves the L transport problems of a candidate barycenter and keeps the
// per-target plans and potentials. Exact bases and Sinkhorn potentials are
// carried over as warm starts.
class TransportOracle {
 public:
  TransportOracle(const std::vector<DiscreteMeasure>& targets,
                  const DivergenceSpec& spec, std::vector<double> lambda)
      : targets_(targets),
        spec_(spec),
        lambda_(std::move(lambda)),
        states_(targets.size()),
        costs_(targets.size()) {}

  double Evaluate(const DiscreteMeasure& nu) {
    if (!std::equal(nu.coords().begin(), nu.coords().end(),
                    support_.begin(), support_.end())) {
      support_.assign(nu.coords().begin(), nu.coords().end());
      for (auto& c : costs_) c.clear();
    }
    ParallelFor(targets_.size(), [&](size_t l) { SolveOne(l, nu); });
    cost_ = 0.0;
    for (size_t l = 0; l < targets_.size(); ++l) {
      cost_ += lambda_[l] * states_[l].value;
    }
    return cost_;
  }

  double cost() const { return cost_; }
  const std::vector<TargetState>& states() const { return states_; }
  void Restore(double cost, std::vector<TargetState> states) {
    cost_ = cost;
    states_ = std::move(states);
  }
  const std::vector<double>& lambda() const { return lambda_; }

  std::vector<double> AveragedPotential() const {
    std::vector<double> g(states_.front().potential.size(), 0.0);
    for (size_t l = 0; l < states_.size(); ++l) {
      for (size_t j = 0; j < g.size(); ++j) {
        g[j] += lambda_[l] * states_[l].potential[j];
      }
    }
    return g;
  }

  // Plan-weighted mean of matched target points for each support atom;
  // `mass` receives the matched mass (zero for empty atoms).
  std::vector<Point> BarycentricProjection(size_t k, size_t dim,
                                           std::vector<double>& mass) const {
    std::vector<Point> num(k, Point(dim, 0.0));
    mass.assign(k, 0.0);
    for (size_t l = 0; l < states_.size(); ++l) {
      const DiscreteMeasure& mu = targets_[l];
      for (const PlanEntry& e : states_[l].plan.entries()) {
        const double w = lambda_[l] * e.mass;
        const auto x = mu.point(e.row);
        for (size_t t = 0; t < dim; ++t) num[e.col][t] += w * x[t];
        mass[e.col] += w;
      }
    }
    for (size_t j = 0; j < k; ++j) {
      if (mass[j] > 0.0) {
        for (double& c : num[j]) c /= mass[j];
      }
    }
    return num;
  }

 private:
  void SolveOne(size_t l, const DiscreteMeasure& nu) {
    const DiscreteMeasure& mu = targets_[l];
    TargetState& s = states_[l];
    const size_t k = nu.size();
    if (spec_.kind() == DivergenceKind::kWasserstein) {
      std::vector<double>& c = costs_[l];
      if (c.empty()) c = CostMatrix(mu, nu, spec_.cost());
      ExactOtOptions opt;
      opt.cost_matrix = c;
      if (s.potential.size() == k && mu.size() >= 8 * k && k <= 64) {
        opt.warm_potentials = s.potential;
      } else if (s.basis.size() == mu.size() + k - 1) {
        opt.warm_start = &s.basis;
      }
      ExactOtResult r = SolveDiscreteOt(mu, nu, spec_.cost(), opt);
      // Largest target potential compatible with the source potentials,
      // which also covers atoms that currently carry no mass.
      std::vector<double> w(k, std::numeric_limits<double>::infinity());
      for (size_t i = 0; i < mu.size(); ++i) {
        for (size_t j = 0; j < k; ++j) {
          w[j] = std::min(w[j], c[i * k + j] - r.source_potentials[i]);
        }
      }
      s.value = r.value;
      s.plan = std::move(r.plan);
      s.potential = DualPotential::Normalized(w, k - 1).w;
      s.basis = std::move(r.basis);
    } else {
      std::span<const double> warm;
      if (s.v.size() == k) warm = s.v;
      SinkhornSolution r = Sinkhorn(mu, nu, spec_.cost(), *spec_.sinkhorn(), warm);
      if (!r.converged) {
        throw SolverError("sinkhorn did not converge inside the barycenter "
                          "solver (marginal error " +
                          std::to_string(r.marginal_error) + ")");
      }
      s.value = r.value;
      s.plan = std::move(r.plan);
      s.potential = r.NormalizedV().w;
      s.v = std::move(r.v);
    }
  }

  const std::vector<DiscreteMeasure>& targets_;
  const DivergenceSpec& spec_;
  std::vector<double> lambda_;
  std::vector<TargetState> states_;
  // Cost matrices against the support in `support_`.
  std::vector<std::vector<double>> costs_;
  std::vector<double> support_;
  double cost_ = 0.0;
};

struct WeightStep {
  std::vector<double> weights;
  double cost = 0.0;
  std::vector<double> gradient;
  size_t iterations = 0;
  // Best cost after each improvement.
  std::vector<double> improvements;
};

// Projected subgradient with Polyak steps towards an adaptive target level.
// The oracle must hold the solution at `start`; on return it holds the
// solution at the best iterate.
WeightStep MinimizeWeights(TransportOracle& oracle,
                           const std::vector<Point>& support,
                           std::vector<double> start, size_t iters) {
  const size_t k = support.size();
  WeightStep best;
  best.weights = start;
  best.cost = oracle.cost();
  best.gradient = oracle.AveragedPotential();
  std::vector<TargetState> best_states = oracle.states();

  std::vector<double> pi = std::move(start);
  double cost = best.cost;
  std::vector<double> g = best.gradient;

  // F(pi) - F* <= <g, pi> - min g, so F - <g, pi> + min g is a lower bound.
  auto gap = [&](const std::vector<double>& x, const std::vector<double>& grad) {
    double dot = 0.0;
    for (size_t j = 0; j < k; ++j) dot += grad[j] * x[j];
    return dot - *std::min_element(grad.begin(), grad.end());
  };
  double lower = cost - gap(pi, g);
  double record = cost;
  double delta = 0.5 * gap(pi, g);
  double path = 0.0;
  constexpr double kPathBudget = 0.5;

  for (size_t it = 0; it < iters; ++it) {
    const double scale = std::max(1.0, std::abs(best.cost));
    if (best.cost - lower <= 1e-13 * scale) break;
    delta = std::min(delta, best.cost - lower);
    if (delta <= 1e-15 * scale) break;

    double mean = 0.0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(k);
    double norm2 = 0.0;
    for (double x : g) norm2 += (x - mean) * (x - mean);
    if (norm2 == 0.0) break;

    const double level = record - delta;
    const double step = (cost - level) / norm2;
    std::vector<double> trial(k);
    for (size_t j = 0; j < k; ++j) trial[j] = pi[j] - step * g[j];
    trial = ProjectToSimplex(trial);
    double moved = 0.0;
    for (size_t j = 0; j < k; ++j) moved += (trial[j] - pi[j]) * (trial[j] - pi[j]);
    path += std::sqrt(moved);
    pi = std::move(trial);

    cost = oracle.Evaluate(MakeMeasure(support, pi));
    g = oracle.AveragedPotential();
    best.iterations = it + 1;
    lower = std::max(lower, cost - gap(pi, g));
    if (cost < best.cost) {
      best.cost = cost;
      best.weights = pi;
      best.gradient = g;
      best_states = oracle.states();
      best.improvements.push_back(cost);
    }
    if (best.cost <= record - 0.5 * delta) {
      record = best.cost;
      path = 0.0;
    } else if (path > kPathBudget) {
      delta *= 0.5;
      path = 0.0;
      pi = best.weights;
      cost = best.cost;
      g = best.gradient;
    }
  }
  oracle.Restore(best.cost, std::move(best_states));
  return best;
}

std::vector<Point> PooledAtoms(const std::vector<DiscreteMeasure>& targets) {
  std::vector<Point> pool;
  for (const DiscreteMeasure& t : targets) {
    for (size_t i = 0; i < t.size(); ++i) {
      if (t.weight(i) > 0.0) pool.emplace_back(t.point(i).begin(), t.point(i).end());
    }
  }
  return pool;
}

// Moves every massless support atom onto the target atom farthest from the
// current support. Massless atoms do not contribute to the cost.
void ReseedEmpty(std::vector<Point>& support, const std::vector<double>& mass,
                 const std::vector<DiscreteMeasure>& targets) {
  std::vector<size_t> empty;
  for (size_t j = 0; j < support.size(); ++j) {
    if (!(mass[j] > 0.0)) empty.push_back(j);
  }
  if (empty.empty()) return;
  const std::vector<Point> pool = PooledAtoms(targets);
  std::vector<double> d2(pool.size(), std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < pool.size(); ++i) {
    for (size_t j = 0; j < support.size(); ++j) {
      if (mass[j] > 0.0) d2[i] = std::min(d2[i], SquaredDistance(pool[i], support[j]));
    }
  }
  for (size_t j : empty) {
    const size_t far = static_cast<size_t>(
        std::max_element(d2.begin(), d2.end()) - d2.begin());
    support[j] = pool[far];
    for (size_t i = 0; i < pool.size(); ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(pool[i], support[j]));
    }
  }
}

bool Converged(double before, double after, double rel_tol) {
  const double scale = std::max(std::abs(before), 1e-300);
  return std::abs(before - after) <= rel_tol * scale;
}

// One barycentric-projection step. Returns true if it was accepted.
bool PositionStep(TransportOracle& oracle, std::vector<Point>& support,
                  const std::vector<double>& weights,
                  const std::vector<DiscreteMeasure>& targets) {
  const size_t dim = support.front().size();
  std::vector<double> mass;
  std::vector<Point> moved =
      oracle.BarycentricProjection(support.size(), dim, mass);
  for (size_t j = 0; j < support.size(); ++j) {
    if (!(mass[j] > 0.0)) moved[j] = support[j];
  }
  ReseedEmpty(moved, mass, targets);
  if (moved == support) return false;
  const double before = oracle.cost();
  std::vector<TargetState> saved = oracle.states();
  const double after = oracle.Evaluate(MakeMeasure(moved, weights));
  if (after <= before) {
    support = std::move(moved);
    return true;
  }
  oracle.Restore(before, std::move(saved));
  return false;
}

// Averaged 1-D matching gradient of the sliced cost with respect to the
// support positions.
std::vector<Point> SlicedGradient(const std::vector<DiscreteMeasure>& targets,
                                  const std::vector<double>& lambda,
                                  const std::vector<Point>& support,
                                  std::span<const double> weights,
                                  const std::vector<Point>& thetas) {
  const size_t k = support.size();
  const size_t dim = support.front().size();
  std::vector<std::vector<Point>> partial(thetas.size(),
                                          std::vector<Point>(k, Point(dim, 0.0)));
  ParallelFor(thetas.size(), [&](size_t t) {
    const Point& theta = thetas[t];
    std::vector<double> py(k);
    for (size_t j = 0; j < k; ++j) {
      py[j] = std::inner_product(support[j].begin(), support[j].end(),
                                 theta.begin(), 0.0);
    }
    std::vector<QuantileSegment> segs;
    for (size_t l = 0; l < targets.size(); ++l) {
      const DiscreteMeasure& mu = targets[l];
      std::vector<double> px(mu.size());
      for (size_t i = 0; i < mu.size(); ++i) {
        const auto x = mu.point(i);
        px[i] = std::inner_product(x.begin(), x.end(), theta.begin(), 0.0);
      }
      W1dRaw(py, weights, px, mu.weights(), CostSpec::Create(2.0), &segs);
      for (const QuantileSegment& s : segs) {
        const double coef = lambda[l] * s.mass * 2.0 * (py[s.source] - px[s.target]);
        for (size_t c = 0; c < dim; ++c) partial[t][s.source][c] += coef * theta[c];
      }
    }
  });
  std::vector<Point> grad(k, Point(dim, 0.0));
  for (const auto& p : partial) {
    for (size_t j = 0; j < k; ++j) {
      for (size_t c = 0; c < dim; ++c) grad[j][c] += p[j][c];
    }
  }
  const double inv = 1.0 / static_cast<double>(thetas.size());
  for (Point& g : grad) {
    for (double& c : g) c *= inv;
  }
  return grad;
}

BarycenterSolution SlicedFreeSupport(const std::vector<DiscreteMeasure>& targets,
                                     std::span<const double> weights,
                                     const DivergenceSpec& spec,
                                     std::vector<Point> support,
                                     const BarycenterOptions& options,
                                     const std::vector<double>& lambda) {
  const size_t dim = support.front().size();
  const std::vector<Point> thetas = spec.dirs()->Directions(dim);
  const std::vector<double> pi(weights.begin(), weights.end());
  BarycenterSolution sol;
  double cost = BaryCost(targets, MakeMeasure(support, pi), spec, lambda);
  sol.cost_trace.push_back(cost);
  for (size_t it = 0; it < options.max_outer; ++it) {
    sol.iterations = it + 1;
    const std::vector<Point> grad =
        SlicedGradient(targets, lambda, support, pi, thetas);
    bool accepted = false;
    double before = cost;
    for (double scale = 1.0; scale > 1e-3 && !accepted; scale *= 0.5) {
      std::vector<Point> trial = support;
      for (size_t j = 0; j < trial.size(); ++j) {
        if (!(pi[j] > 0.0)) continue;
        const double step = scale * 0.5 * static_cast<double>(dim) / pi[j];
        for (size_t c = 0; c < dim; ++c) trial[j][c] -= step * grad[j][c];
      }
      const double c = BaryCost(targets, MakeMeasure(trial, pi), spec, lambda);
      if (c < cost) {
        support = std::move(trial);
        cost = c;
        accepted = true;
        sol.cost_trace.push_back(cost);
      }
    }
    if (!accepted || Converged(before, cost, options.rel_tol)) {
      sol.converged = true;
      break;
    }
  }
  sol.support = std::move(support);
  sol.weights = pi;
  sol.cost = cost;
  return sol;
}

void CheckSupport(const std::vector<Point>& support, size_t dim) {
  if (support.empty()) throw InputError("support must be nonempty");
  for (const Point& y : support) {
    if (y.size() != dim) throw InputError("support dimension mismatch");
    for (double c : y) {
      if (!std::isfinite(c)) throw InputError("non-finite support point");
    }
  }
}

std::vector<double> CheckWeights(std::span<const double> weights, size_t k) {
  if (weights.size() != k) {
    throw InputError("got " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(k) + " support points");
  }
  // Reuses the measure validation (nonnegative, unit mass, rescaled once).
  std::vector<double> coords(k, 0.0);
  const DiscreteMeasure m = DiscreteMeasure::FromFlat(
      1, std::move(coords), std::vector<double>(weights.begin(), weights.end()));
  return std::vector<double>(m.weights().begin(), m.weights().end());
}

// One restart of the sparse problem from a given support.
BarycenterSolution SparseRun(const std::vector<DiscreteMeasure>& targets,
                             const DivergenceSpec& spec,
                             const BarycenterOptions& options,
                             const std::vector<double>& lambda,
                             const DiscreteMeasure& pooled,
                             std::vector<Point> support,
                             std::vector<double> pi = {}) {
  const bool voronoi = targets.size() == 1 &&
                       spec.kind() == DivergenceKind::kWasserstein;
  TransportOracle oracle(targets, spec, lambda);
  if (pi.empty()) pi = NearestMasses(support, pooled);
  BarycenterSolution sol;
  double cost = oracle.Evaluate(MakeMeasure(support, pi));
  sol.cost_trace.push_back(cost);

  for (size_t it = 0; it < options.max_outer; ++it) {
    sol.iterations = it + 1;
    const double before = cost;
    if (PositionStep(oracle, support, pi, targets)) {
      cost = oracle.cost();
      sol.cost_trace.push_back(cost);
    }
    if (voronoi) {
      std::vector<double> next = NearestMasses(support, targets.front());
      if (next != pi) {
        const std::vector<TargetState> saved = oracle.states();
        const double c = oracle.Evaluate(MakeMeasure(support, next));
        if (c <= cost) {
          pi = std::move(next);
          cost = c;
          sol.cost_trace.push_back(cost);
        } else {
          oracle.Restore(cost, saved);
        }
      }
    } else {
      WeightStep ws =
          MinimizeWeights(oracle, support, pi, options.sparse_weight_iters);
      if (ws.cost < cost) {
        pi = std::move(ws.weights);
        cost = ws.cost;
        sol.cost_trace.push_back(cost);
      }
    }
    if (Converged(before, cost, options.rel_tol)) {
      sol.converged = true;
      break;
    }
  }
  sol.support = std::move(support);
  sol.weights = std::move(pi);
  sol.cost = cost;
  sol.weight_gradient = oracle.AveragedPotential();
  return sol;
}

}  // namespace

DiscreteMeasure BarycenterSolution::ToMeasure() const {
  return MakeMeasure(support, weights);
}

std::vector<double> ProjectToSimplex(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (size_t i = 0; i < n; ++i) {
    cumsum += u[i];
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  std::vector<double> out(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out[i] = std::max(v[i] - tau, 0.0);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

double BaryCost(const std::vector<DiscreteMeasure>& targets,
                const DiscreteMeasure& nu, const DivergenceSpec& spec,
                std::span<const double> target_weights) {
  const size_t dim = CheckTargets(targets);
  if (nu.dim() != dim) throw InputError("barycenter dimension mismatch");
  const std::vector<double> lambda = TargetLambda(targets.size(), target_weights);
  std::vector<double> values(targets.size());
  ParallelFor(targets.size(), [&](size_t l) {
    values[l] = EvaluateDivergence(targets[l], nu, spec).value;
  });
  double total = 0.0;
  for (size_t l = 0; l < targets.size(); ++l) total += lambda[l] * values[l];
  return total;
}

BarycenterSolution SolveFixedSupport(const std::vector<DiscreteMeasure>& targets,
                                     const std::vector<Point>& support,
                                     const DivergenceSpec& spec,
                                     const BarycenterOptions& options,
                                     std::span<const double> initial_weights) {
  const size_t dim = CheckTargets(targets);
  CheckSupport(support, dim);
  if (!IsTransportKind(spec.kind())) {
    throw InputError("fixed-support barycenters need kind wasserstein or "
                     "sinkhorn");
  }
  const std::vector<double> lambda =
      TargetLambda(targets.size(), options.target_weights);
  const size_t k = support.size();
  std::vector<double> pi =
      initial_weights.empty()
          ? std::vector<double>(k, 1.0 / static_cast<double>(k))
          : CheckWeights(initial_weights, k);
  if (targets.size() == 1 && spec.kind() == DivergenceKind::kWasserstein &&
      initial_weights.empty()) {
    // Voronoi masses are optimal for a single target.
    pi = NearestMasses(support, targets.front());
  }

  TransportOracle oracle(targets, spec, lambda);
  BarycenterSolution sol;
  sol.cost_trace.push_back(oracle.Evaluate(MakeMeasure(support, pi)));
  WeightStep ws = MinimizeWeights(oracle, support, pi, options.weight_iters);
  for (double c : ws.improvements) sol.cost_trace.push_back(c);
  sol.support = support;
  sol.weights = std::move(ws.weights);
  sol.cost = ws.cost;
  sol.iterations = ws.iterations;
  sol.converged = ws.iterations < options.weight_iters;
  sol.weight_gradient = std::move(ws.gradient);
  return sol;
}

BarycenterSolution SolveFreeSupport(const std::vector<DiscreteMeasure>& targets,
                                    std::span<const double> weights,
                                    const DivergenceSpec& spec,
                                    std::vector<Point> init,
                                    const BarycenterOptions& options) {
  const size_t dim = CheckTargets(targets);
  CheckSupport(init, dim);
  RequireP2(spec, "free-support barycenter");
  const std::vector<double> pi = CheckWeights(weights, init.size());
  const std::vector<double> lambda =
      TargetLambda(targets.size(), options.target_weights);
  if (spec.kind() == DivergenceKind::kSliced) {
    return SlicedFreeSupport(targets, pi, spec, std::move(init), options, lambda);
  }
  if (!IsTransportKind(spec.kind())) {
    throw InputError("free-support barycenters need kind wasserstein, "
                     "sinkhorn or sliced");
  }
  TransportOracle oracle(targets, spec, lambda);
  BarycenterSolution sol;
  double cost = oracle.Evaluate(MakeMeasure(init, pi));
  sol.cost_trace.push_back(cost);
  for (size_t it = 0; it < options.max_outer; ++it) {
    sol.iterations = it + 1;
    const double before = cost;
    if (!PositionStep(oracle, init, pi, targets)) {
      sol.converged = true;
      break;
    }
    cost = oracle.cost();
    sol.cost_trace.push_back(cost);
    if (Converged(before, cost, options.rel_tol)) {
      sol.converged = true;
      break;
    }
  }
  sol.support = std::move(init);
  sol.weights = pi;
  sol.cost = cost;
  sol.weight_gradient = oracle.AveragedPotential();
  return sol;
}

namespace {

BarycenterSolution DropEmptyAtoms(BarycenterSolution sol) {
  BarycenterSolution out;
  for (size_t j = 0; j < sol.support.size(); ++j) {
    if (sol.weights[j] > 0.0) {
      out.support.push_back(sol.support[j]);
      out.weights.push_back(sol.weights[j]);
      if (!sol.weight_gradient.empty()) {
        out.weight_gradient.push_back(sol.weight_gradient[j]);
      }
    }
  }
  out.cost = sol.cost;
  out.iterations = sol.iterations;
  out.cost_trace = std::move(sol.cost_trace);
  out.converged = sol.converged;
  return out;
}

}  // namespace

BarycenterSolution SolveSparse(const std::vector<DiscreteMeasure>& targets,
                               size_t n, const DivergenceSpec& spec,
                               uint64_t seed, const BarycenterOptions& options) {
  CheckTargets(targets);
  if (n == 0) throw InputError("sparse barycenter needs N >= 1");
  if (!IsTransportKind(spec.kind())) {
    throw InputError("sparse barycenters need kind wasserstein or sinkhorn");
  }
  RequireP2(spec, "sparse barycenter");
  if (options.restarts == 0) throw InputError("restarts must be >= 1");
  const std::vector<double> lambda =
      TargetLambda(targets.size(), options.target_weights);
  const DiscreteMeasure pooled = Mixture(targets, lambda);

  std::vector<BarycenterSolution> runs(options.restarts);
  ParallelFor(options.restarts, [&](size_t r) {
    runs[r] = SparseRun(targets, spec, options, lambda, pooled,
                        KMeansPlusPlus(pooled, n, DeriveSeed(seed, {r})));
  });
  size_t best = 0;
  for (size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].cost < runs[best].cost) best = r;
  }
  return DropEmptyAtoms(std::move(runs[best]));
}

BarycenterSolution RefineSparse(const std::vector<DiscreteMeasure>& targets,
                                const BarycenterSolution& start,
                                const DivergenceSpec& spec,
                                const BarycenterOptions& options) {
  CheckTargets(targets);
  if (start.support.empty() || start.support.size() != start.weights.size()) {
    throw InputError("refinement needs a start with one weight per atom");
  }
  if (!IsTransportKind(spec.kind())) {
    throw InputError("sparse barycenters need kind wasserstein or sinkhorn");
  }
  RequireP2(spec, "sparse barycenter");
  const std::vector<double> lambda =
      TargetLambda(targets.size(), options.target_weights);
  const DiscreteMeasure pooled = Mixture(targets, lambda);
  return DropEmptyAtoms(SparseRun(targets, spec, options, lambda, pooled,
                                  start.support,
                                  ProjectToSimplex(start.weights)));
}

BarycenterSolution SolveBarycenter(const std::vector<DiscreteMeasure>& targets,
                                   const BarycenterConstraint& constraint,
                                   const DivergenceSpec& spec, uint64_t seed,
                                   const BarycenterOptions& options) {
  if (const auto* c = std::get_if<SparseConstraint>(&constraint)) {
    return SolveSparse(targets, c->n, spec, seed, options);
  }
  if (const auto* c = std::get_if<FixedSupportConstraint>(&constraint)) {
    return SolveFixedSupport(targets, c->support, spec, options);
  }
  const auto& c = std::get<FreeSupportConstraint>(constraint);
  CheckTargets(targets);
  const std::vector<double> lambda =
      TargetLambda(targets.size(), options.target_weights);
  const DiscreteMeasure pooled = Mixture(targets, lambda);
  const size_t k = c.weights.size();
  if (k == 0) throw InputError("free-support weights are empty");
  std::vector<Point> init = KMeansPlusPlus(pooled, k, seed);
  while (init.size() < k) init.push_back(init.back());
  return SolveFreeSupport(targets, c.weights, spec, std::move(init), options);
}

std::string BarycenterToJson(const BarycenterSolution& solution) {
  nlohmann::json j;
  j["points"] = solution.support;
  j["weights"] = solution.weights;
  j["cost"] = solution.cost;
  j["trace"] = solution.cost_trace;
  j["iterations"] = solution.iterations;
  j["converged"] = solution.converged;
  return j.dump(2) + "\n";
}

}  // namespace otbary
