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

#ifndef OTBARY_SRC_CELL_TRANSPORT_H_
#define OTBARY_SRC_CELL_TRANSPORT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otbary/ot_exact.h"

namespace otbary::internal {

struct CellTransportResult {
  double value = 0.0;
  // Sorted by (row, col).
  std::vector<PlanEntry> entries;
  // Optimal target potentials w and their c-transform u_i = min_j c_ij - w_j.
  std::vector<double> w;
  std::vector<double> u;
  size_t augmentations = 0;
};

// Exact transport from m weighted sources to k sinks for k much smaller than
// m. Every source starts in its Laguerre cell argmin_j c_ij - w_j, which is
// dual feasible and complementary; cell mass imbalances are then removed by
// shortest augmenting paths on the k-node graph whose arc j -> j' moves the
// cheapest source of cell j over to j'. Per (j, j') heaps keyed by
// c_ij' - c_ij make an augmentation cost O(k^2 + moved sources * k log m).
// `warm_w` (any additive normalization) replaces the zero start.
CellTransportResult SolveCellTransport(std::span<const double> supply,
                                       std::span<const double> demand,
                                       std::span<const double> cost,
                                       std::span<const double> warm_w = {});

}  // namespace otbary::internal

#endif  // OTBARY_SRC_CELL_TRANSPORT_H_
