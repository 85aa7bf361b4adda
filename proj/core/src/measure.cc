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

#include "otbary/measure.h"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "otbary/errors.h"
#include "otbary/random.h"

namespace otbary {
namespace {

constexpr double kNegativeWeightTol = 1e-15;
constexpr double kMassTol = 1e-9;

void Validate(size_t dim, const std::vector<double>& coords,
              std::vector<double>& weights, bool rescale) {
  if (weights.empty()) throw InputError("measure must have at least one atom");
  if (dim == 0) throw InputError("measure dimension must be positive");
  if (coords.size() != dim * weights.size()) {
    throw InputError("measure has " + std::to_string(weights.size()) +
                     " weights but coordinates for " +
                     std::to_string(coords.size() / dim) + " points");
  }
  for (double c : coords) {
    if (!std::isfinite(c)) throw InputError("non-finite point coordinate");
  }
  double total = 0.0;
  for (double& w : weights) {
    if (!std::isfinite(w)) throw InputError("non-finite weight");
    if (w < 0.0) {
      if (w < -kNegativeWeightTol) {
        throw InputError("negative weight " + std::to_string(w));
      }
      w = 0.0;
    }
    total += w;
  }
  if (total <= 0.0) throw InputError("measure has zero total mass");
  if (std::abs(total - 1.0) > kMassTol) {
    throw InputError("total mass " + std::to_string(total) +
                     " is not within 1e-9 of 1");
  }
  if (rescale && total != 1.0) {
    for (double& w : weights) w /= total;
  }
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

}  // namespace

DiscreteMeasure DiscreteMeasure::Create(const std::vector<Point>& points,
                                        std::vector<double> weights) {
  if (points.empty()) throw InputError("measure must have at least one atom");
  if (points.size() != weights.size()) {
    throw InputError("got " + std::to_string(points.size()) + " points and " +
                     std::to_string(weights.size()) + " weights");
  }
  const size_t dim = points.front().size();
  std::vector<double> coords;
  coords.reserve(dim * points.size());
  for (const Point& p : points) {
    if (p.size() != dim) throw InputError("points have mixed dimensions");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return FromFlat(dim, std::move(coords), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::FromFlat(size_t dim, std::vector<double> coords,
                                          std::vector<double> weights) {
  Validate(dim, coords, weights, /*rescale=*/true);
  return DiscreteMeasure(dim, std::move(coords), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::FromFlatNoRescale(size_t dim,
                                                   std::vector<double> coords,
                                                   std::vector<double> weights) {
  Validate(dim, coords, weights, /*rescale=*/false);
  return DiscreteMeasure(dim, std::move(coords), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::Uniform(const std::vector<Point>& points) {
  return Create(points, std::vector<double>(points.size(),
                                            1.0 / static_cast<double>(points.size())));
}

DiscreteMeasure DiscreteMeasure::UniformFlat(size_t dim,
                                             std::vector<double> coords) {
  if (dim == 0 || coords.empty()) {
    throw InputError("measure must have at least one atom");
  }
  const size_t n = coords.size() / dim;
  return FromFlat(dim, std::move(coords),
                  std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<Point> DiscreteMeasure::points() const {
  std::vector<Point> out(size());
  for (size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    out[i].assign(p.begin(), p.end());
  }
  return out;
}

DiscreteMeasure Canonicalize(const DiscreteMeasure& m, double atom_tol) {
  const size_t dim = m.dim();
  const double tol2 = atom_tol * atom_tol;
  // Representatives indexed by first coordinate for a windowed search.
  std::multimap<double, size_t> by_first;
  std::vector<size_t> rep_atom;
  std::vector<double> rep_weight;
  for (size_t i = 0; i < m.size(); ++i) {
    auto x = m.point(i);
    size_t best = rep_atom.size();
    auto lo = by_first.lower_bound(x[0] - atom_tol);
    auto hi = by_first.upper_bound(x[0] + atom_tol);
    for (auto it = lo; it != hi; ++it) {
      if (it->second < best &&
          SquaredDistance(x, m.point(rep_atom[it->second])) <= tol2) {
        best = it->second;
      }
    }
    if (best == rep_atom.size()) {
      rep_atom.push_back(i);
      rep_weight.push_back(m.weight(i));
      by_first.emplace(x[0], best);
    } else {
      rep_weight[best] += m.weight(i);
    }
  }
  std::vector<double> coords;
  std::vector<double> weights;
  coords.reserve(rep_atom.size() * dim);
  weights.reserve(rep_atom.size());
  for (size_t r = 0; r < rep_atom.size(); ++r) {
    if (rep_weight[r] <= 0.0) continue;
    auto x = m.point(rep_atom[r]);
    coords.insert(coords.end(), x.begin(), x.end());
    weights.push_back(rep_weight[r]);
  }
  return DiscreteMeasure::FromFlatNoRescale(dim, std::move(coords),
                                           std::move(weights));
}

DiscreteMeasure Project(const DiscreteMeasure& m,
                        std::span<const double> theta) {
  if (theta.size() != m.dim()) {
    throw InputError("direction dimension does not match the measure");
  }
  double norm2 = 0.0;
  for (double t : theta) norm2 += t * t;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
    throw InputError("projection direction is not a unit vector");
  }
  std::vector<double> coords(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    auto x = m.point(i);
    coords[i] = std::inner_product(x.begin(), x.end(), theta.begin(), 0.0);
  }
  std::vector<double> weights(m.weights().begin(), m.weights().end());
  return Canonicalize(DiscreteMeasure::FromFlatNoRescale(1, std::move(coords),
                                                          std::move(weights)));
}

double Radius(const DiscreteMeasure& m) {
  double r2 = 0.0;
  for (size_t i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (double c : m.point(i)) s += c * c;
    r2 = std::max(r2, s);
  }
  return std::sqrt(r2);
}

DiscreteMeasure Mixture(const std::vector<DiscreteMeasure>& parts,
                        std::span<const double> mixing) {
  if (parts.empty() || parts.size() != mixing.size()) {
    throw InputError("mixture needs one weight per component");
  }
  const size_t dim = parts.front().dim();
  std::vector<double> coords;
  std::vector<double> weights;
  for (size_t l = 0; l < parts.size(); ++l) {
    if (parts[l].dim() != dim) throw InputError("mixture of mixed dimensions");
    coords.insert(coords.end(), parts[l].coords().begin(),
                  parts[l].coords().end());
    for (double w : parts[l].weights()) weights.push_back(mixing[l] * w);
  }
  return DiscreteMeasure::FromFlatNoRescale(dim, std::move(coords),
                                           std::move(weights));
}

GaussianSpec GaussianSpec::Create(Point mean, std::vector<double> covariance) {
  const size_t d = mean.size();
  if (d == 0) throw InputError("Gaussian mean must be nonempty");
  if (covariance.size() != d * d) {
    throw InputError("covariance must be a d x d matrix");
  }
  for (double v : mean) {
    if (!std::isfinite(v)) throw InputError("non-finite Gaussian mean");
  }
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (std::abs(covariance[i * d + j] - covariance[j * d + i]) > 1e-12) {
        throw InputError("covariance is not symmetric");
      }
    }
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      cov(covariance.data(), d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InputError("covariance is not positive definite");
  }
  Eigen::MatrixXd lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0)) {
      throw InputError("covariance is not positive definite");
    }
  }
  std::vector<double> chol(d * d, 0.0);
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j <= i; ++j) chol[i * d + j] = lower(i, j);
  }
  return GaussianSpec(std::move(mean), std::move(covariance), std::move(chol));
}

std::vector<double> SampleGaussianFlat(const GaussianSpec& spec, size_t n,
                                       uint64_t seed) {
  if (n == 0) throw InputError("sample size must be positive");
  const size_t d = spec.dim();
  const auto& chol = spec.cholesky();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(d);
  std::vector<double> out(n * d);
  for (size_t s = 0; s < n; ++s) {
    for (size_t k = 0; k < d; ++k) z[k] = normal(rng);
    for (size_t i = 0; i < d; ++i) {
      double v = spec.mean()[i];
      for (size_t j = 0; j <= i; ++j) v += chol[i * d + j] * z[j];
      out[s * d + i] = v;
    }
  }
  return out;
}

std::vector<Point> SampleGaussian(const GaussianSpec& spec, size_t n,
                                  uint64_t seed) {
  const size_t d = spec.dim();
  std::vector<double> flat = SampleGaussianFlat(spec, n, seed);
  std::vector<Point> out(n);
  for (size_t s = 0; s < n; ++s) {
    out[s].assign(flat.begin() + s * d, flat.begin() + (s + 1) * d);
  }
  return out;
}

}  // namespace otbary
