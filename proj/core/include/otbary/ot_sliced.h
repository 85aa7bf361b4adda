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

#ifndef OTBARY_OT_SLICED_H_
#define OTBARY_OT_SLICED_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otbary/measure.h"
#include "otbary/ot_exact.h"

namespace otbary {

// Directions on the unit sphere used to slice measures.
class DirectionSet {
 public:
  // `count` normalized standard Gaussian draws; direction k depends only on
  // (seed, k).
  static DirectionSet MonteCarlo(uint64_t seed, size_t count = 256);
  // Explicit unit vectors (norm within 1e-12 of one, common dimension).
  static DirectionSet Fixed(std::vector<Point> directions);

  bool monte_carlo() const { return monte_carlo_; }
  uint64_t seed() const { return seed_; }
  size_t count() const {
    return monte_carlo_ ? count_ : fixed_.size();
  }
  // Materializes the directions for dimension `dim`. Throws InputError if a
  // fixed set has a different dimension.
  std::vector<Point> Directions(size_t dim) const;

 private:
  DirectionSet() = default;

  bool monte_carlo_ = true;
  uint64_t seed_ = 0;
  size_t count_ = 0;
  std::vector<Point> fixed_;
};

struct SlicedResult {
  double value = 0.0;
  // Sample standard deviation over directions divided by sqrt(K).
  double std_error = 0.0;
};

// SW_p^p estimated as the mean of 1-D W_p^p over the direction set.
SlicedResult SlicedW(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const CostSpec& cost, const DirectionSet& dirs);

struct MaxSlicedOptions {
  // d > 2: multi-start projected gradient ascent on the sphere.
  size_t restarts = 16;
  size_t steps = 200;
  double step = 0.1;
  // d == 2: angular grid over [0, pi) followed by golden-section search.
  size_t grid_angles = 4096;
  uint64_t seed = 0;
};

struct MaxSlicedResult {
  double value = 0.0;
  Point theta;
};

// max over unit theta of W_p^p between the projected measures.
MaxSlicedResult MaxSlicedW(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const CostSpec& cost,
                           const MaxSlicedOptions& options = {});

// 1-D W_p^p between the projections onto theta (normalized internally).
double ProjectedW(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  const CostSpec& cost, std::span<const double> theta);

}  // namespace otbary

#endif  // OTBARY_OT_SLICED_H_
