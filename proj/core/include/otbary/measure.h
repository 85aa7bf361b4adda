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

#ifndef OTBARY_MEASURE_H_
#define OTBARY_MEASURE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace otbary {

// A point of R^d.
using Point = std::vector<double>;

// Atoms closer than this (Euclidean) are treated as the same atom.
inline constexpr double kDefaultAtomTol = 1e-9;

// Weighted point cloud sum_i w_i delta_{x_i} with w on the probability
// simplex. Immutable once built; points are stored row-major.
class DiscreteMeasure {
 public:
  // Validates the input and renormalizes the weights so they sum to one.
  // Weights in [-1e-15, 0) are clamped to zero. Throws InputError on a
  // dimension mismatch, an empty or non-finite input, a negative weight, or
  // a total mass farther than 1e-9 from one.
  static DiscreteMeasure Create(const std::vector<Point>& points,
                                std::vector<double> weights);
  static DiscreteMeasure FromFlat(size_t dim, std::vector<double> coords,
                                  std::vector<double> weights);
  // Validates like FromFlat but leaves the weights untouched. Used for
  // measures derived from an already-normalized one (merging, projection)
  // so that weights are rescaled exactly once, at first construction.
  static DiscreteMeasure FromFlatNoRescale(size_t dim,
                                           std::vector<double> coords,
                                           std::vector<double> weights);
  // Empirical measure (1/n) sum_i delta_{x_i}.
  static DiscreteMeasure Uniform(const std::vector<Point>& points);
  static DiscreteMeasure UniformFlat(size_t dim, std::vector<double> coords);

  size_t size() const { return weights_.size(); }
  size_t dim() const { return dim_; }

  std::span<const double> point(size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double weight(size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> coords() const { return coords_; }
  std::vector<Point> points() const;

 private:
  DiscreteMeasure(size_t dim, std::vector<double> coords,
                  std::vector<double> weights)
      : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {}

  size_t dim_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

// Merges atoms within atom_tol of an earlier representative (summing their
// weights) and drops zero-weight atoms. Representatives keep their original
// coordinates and first-occurrence order, so the output atoms are pairwise
// farther than atom_tol apart and the operation is idempotent.
DiscreteMeasure Canonicalize(const DiscreteMeasure& m,
                             double atom_tol = kDefaultAtomTol);

// Pushforward by x -> <x, theta>, canonicalized. theta must be a unit vector
// (within 1e-12) of the measure's dimension.
DiscreteMeasure Project(const DiscreteMeasure& m,
                        std::span<const double> theta);

// max_i |x_i|.
double Radius(const DiscreteMeasure& m);

// Nonnegative weighted mixture of measures sharing a dimension.
DiscreteMeasure Mixture(const std::vector<DiscreteMeasure>& parts,
                        std::span<const double> mixing);

// Multivariate normal law N(mean, covariance).
class GaussianSpec {
 public:
  // covariance is row-major d x d. Throws InputError if it is not symmetric
  // within 1e-12 or if its Cholesky factorization fails.
  static GaussianSpec Create(Point mean, std::vector<double> covariance);

  size_t dim() const { return mean_.size(); }
  const Point& mean() const { return mean_; }
  const std::vector<double>& covariance() const { return covariance_; }
  // Lower-triangular factor L with L L^T = covariance, row-major.
  const std::vector<double>& cholesky() const { return cholesky_; }

 private:
  GaussianSpec(Point mean, std::vector<double> covariance,
               std::vector<double> cholesky)
      : mean_(std::move(mean)),
        covariance_(std::move(covariance)),
        cholesky_(std::move(cholesky)) {}

  Point mean_;
  std::vector<double> covariance_;
  std::vector<double> cholesky_;
};

// n draws from the law; identical seeds give bit-identical samples.
std::vector<Point> SampleGaussian(const GaussianSpec& spec, size_t n,
                                  uint64_t seed);
// Same draws, row-major n x d.
std::vector<double> SampleGaussianFlat(const GaussianSpec& spec, size_t n,
                                       uint64_t seed);

}  // namespace otbary

#endif  // OTBARY_MEASURE_H_
