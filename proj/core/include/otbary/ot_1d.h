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

#ifndef OTBARY_OT_1D_H_
#define OTBARY_OT_1D_H_

#include <cstdint>
#include <span>
#include <vector>

#include "otbary/measure.h"
#include "otbary/ot_exact.h"

namespace otbary {

// A piece of the monotone (quantile) coupling: `mass` moves from source atom
// `source` to target atom `target`. Indices refer to the caller's order.
struct QuantileSegment {
  uint32_t source;
  uint32_t target;
  double mass;
};

// W_p^p between two 1-D measures by merging their quantile functions.
// Throws InputError unless both measures are one-dimensional.
double W1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
           const CostSpec& cost);

// Same computation on raw positions and weights (weights summing to one).
// Atom order does not affect the result. When `segments` is non-null it
// receives the monotone coupling.
double W1dRaw(std::span<const double> x, std::span<const double> a,
              std::span<const double> y, std::span<const double> b,
              const CostSpec& cost,
              std::vector<QuantileSegment>* segments = nullptr);

}  // namespace otbary

#endif  // OTBARY_OT_1D_H_
