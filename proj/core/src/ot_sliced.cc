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

#include "otbary/ot_sliced.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "otbary/errors.h"
#include "otbary/ot_1d.h"
#include "otbary/parallel.h"
#include "otbary/random.h"

namespace otbary {
namespace {

constexpr double kUnitTol = 1e-12;

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void Normalize(Point& v) {
  const double n = Norm(v);
  for (double& x : v) x /= n;
}

Point GaussianDirection(uint64_t seed, size_t dim) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  Point v(dim);
  do {
    for (double& x : v) x = normal(rng);
  } while (Norm(v) == 0.0);
  Normalize(v);
  return v;
}

std::vector<double> ProjectCoords(const DiscreteMeasure& m,
                                  std::span<const double> theta) {
  std::vector<double> out(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    const auto x = m.point(i);
    double s = 0.0;
    for (size_t k = 0; k < x.size(); ++k) s += x[k] * theta[k];
    out[i] = s;
  }
  return out;
}

// Value and Riemannian gradient of theta -> W_p^p(P_theta mu, P_theta nu),
// the gradient taken through the optimal monotone coupling at theta.
double ValueAndGradient(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostSpec& cost, const Point& theta,
                        Point* grad) {
  std::vector<QuantileSegment> segs;
  const auto px = ProjectCoords(mu, theta);
  const auto py = ProjectCoords(nu, theta);
  const double value =
      W1dRaw(px, mu.weights(), py, nu.weights(), cost, grad ? &segs : nullptr);
  if (grad != nullptr) {
    const double p = cost.p();
    grad->assign(theta.size(), 0.0);
    for (const QuantileSegment& s : segs) {
      const double delta = px[s.source] - py[s.target];
      if (delta == 0.0) continue;
      const double scale = s.mass * p * std::pow(std::abs(delta), p - 1.0) *
                           (delta > 0.0 ? 1.0 : -1.0);
      const auto x = mu.point(s.source);
      const auto y = nu.point(s.target);
      for (size_t k = 0; k < theta.size(); ++k) {
        (*grad)[k] += scale * (x[k] - y[k]);
      }
    }
    double radial = 0.0;
    for (size_t k = 0; k < theta.size(); ++k) radial += (*grad)[k] * theta[k];
    for (size_t k = 0; k < theta.size(); ++k) (*grad)[k] -= radial * theta[k];
  }
  return value;
}

MaxSlicedResult SearchPlane(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, const CostSpec& cost,
                            size_t grid) {
  auto at = [&](double angle) {
    const double t[2] = {std::cos(angle), std::sin(angle)};
    return ProjectedW(mu, nu, cost, t);
  };
  grid = std::max<size_t>(grid, 8);
  const double h = std::numbers::pi / static_cast<double>(grid);
  std::vector<double> values(grid);
  ParallelFor(grid, [&](size_t g) { values[g] = at(h * static_cast<double>(g)); });
  const size_t best =
      static_cast<size_t>(std::max_element(values.begin(), values.end()) -
                          values.begin());
  double best_angle = h * static_cast<double>(best);
  double best_value = values[best];

  // Golden-section refinement on the bracketing grid cell pair.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_angle - h;
  double hi = best_angle + h;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = at(c);
  double fd = at(d);
  for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = at(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = at(d);
    }
  }
  if (fc > best_value) {
    best_value = fc;
    best_angle = c;
  }
  if (fd > best_value) {
    best_value = fd;
    best_angle = d;
  }
  return {best_value, {std::cos(best_angle), std::sin(best_angle)}};
}

MaxSlicedResult SearchSphere(const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, const CostSpec& cost,
                             const MaxSlicedOptions& options) {
  const size_t dim = mu.dim();
  const size_t restarts = std::max<size_t>(options.restarts, 1);
  const size_t pool = std::max<size_t>(4 * restarts, 64);

  std::vector<Point> candidates(pool);
  std::vector<double> scores(pool);
  ParallelFor(pool, [&](size_t c) {
    candidates[c] = GaussianDirection(DeriveSeed(options.seed, {c}), dim);
    scores[c] = ValueAndGradient(mu, nu, cost, candidates[c], nullptr);
  });
  std::vector<size_t> order(pool);
  for (size_t c = 0; c < pool; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  std::vector<MaxSlicedResult> runs(restarts);
  ParallelFor(restarts, [&](size_t r) {
    Point theta = candidates[order[r]];
    Point grad;
    double value = ValueAndGradient(mu, nu, cost, theta, &grad);
    double step = options.step;
    for (size_t it = 0; it < options.steps && step > 1e-10; ++it) {
      const double gnorm = Norm(grad);
      if (gnorm == 0.0) break;
      bool moved = false;
      while (step > 1e-10) {
        Point trial(dim);
        for (size_t k = 0; k < dim; ++k) {
          trial[k] = theta[k] + step * grad[k] / gnorm;
        }
        Normalize(trial);
        Point trial_grad;
        const double v = ValueAndGradient(mu, nu, cost, trial, &trial_grad);
        if (v > value) {
          theta = std::move(trial);
          grad = std::move(trial_grad);
          value = v;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    runs[r] = {value, std::move(theta)};
  });
  size_t best = 0;
  for (size_t r = 1; r < restarts; ++r) {
    if (runs[r].value > runs[best].value) best = r;
  }
  return runs[best];
}

}  // namespace

DirectionSet DirectionSet::MonteCarlo(uint64_t seed, size_t count) {
  if (count == 0) throw InputError("direction count must be positive");
  DirectionSet s;
  s.monte_carlo_ = true;
  s.seed_ = seed;
  s.count_ = count;
  return s;
}

DirectionSet DirectionSet::Fixed(std::vector<Point> directions) {
  if (directions.empty()) throw InputError("direction set is empty");
  const size_t dim = directions.front().size();
  for (const Point& t : directions) {
    if (t.size() != dim || dim == 0) {
      throw InputError("directions have mixed dimensions");
    }
    if (std::abs(Norm(t) - 1.0) > kUnitTol) {
      throw InputError("direction is not a unit vector");
    }
  }
  DirectionSet s;
  s.monte_carlo_ = false;
  s.fixed_ = std::move(directions);
  return s;
}

std::vector<Point> DirectionSet::Directions(size_t dim) const {
  if (!monte_carlo_) {
    if (fixed_.front().size() != dim) {
      throw InputError("direction dimension " +
                       std::to_string(fixed_.front().size()) +
                       " does not match measure dimension " +
                       std::to_string(dim));
    }
    return fixed_;
  }
  std::vector<Point> out(count_);
  for (size_t k = 0; k < count_; ++k) {
    out[k] = GaussianDirection(DeriveSeed(seed_, {k}), dim);
  }
  return out;
}

double ProjectedW(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  const CostSpec& cost, std::span<const double> theta) {
  if (mu.dim() != nu.dim() || theta.size() != mu.dim()) {
    throw InputError("dimension mismatch in projected transport");
  }
  Point t(theta.begin(), theta.end());
  Normalize(t);
  return ValueAndGradient(mu, nu, cost, t, nullptr);
}

SlicedResult SlicedW(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const CostSpec& cost, const DirectionSet& dirs) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  const auto thetas = dirs.Directions(mu.dim());
  const size_t n = thetas.size();
  std::vector<double> values(n);
  ParallelFor(n, [&](size_t k) {
    values[k] = W1d(Project(mu, thetas[k]), Project(nu, thetas[k]), cost);
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  SlicedResult r;
  r.value = mean;
  if (n > 1) {
    var /= static_cast<double>(n - 1);
    r.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return r;
}

MaxSlicedResult MaxSlicedW(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const CostSpec& cost,
                           const MaxSlicedOptions& options) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  if (options.restarts == 0) throw InputError("restarts must be >= 1");
  switch (mu.dim()) {
    case 1:
      return {W1d(mu, nu, cost), {1.0}};
    case 2:
      return SearchPlane(mu, nu, cost, options.grid_angles);
    default:
      return SearchSphere(mu, nu, cost, options);
  }
}

}  // namespace otbary
