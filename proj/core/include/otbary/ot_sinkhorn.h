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

#ifndef OTBARY_OT_SINKHORN_H_
#define OTBARY_OT_SINKHORN_H_

#include <cstddef>
#include <span>
#include <vector>

#include "otbary/measure.h"
#include "otbary/ot_exact.h"

namespace otbary {

struct SinkhornConfig {
  double epsilon = 1.0;
  // Stop once the L1 violation of both marginals is at most tol.
  double tol = 1e-6;
  size_t max_iter = 100000;

  // Throws InputError unless epsilon > 0, tol > 0 and max_iter > 0.
  void Validate() const;
};

// Entropic transport with KL(g | mu x nu) = sum g (log(dg / d(mu x nu)) - 1).
// Under this convention the value can be negative: W_eps(delta_x, delta_x)
// equals -epsilon.
struct SinkhornSolution {
  double value = 0.0;
  // Source and target log-domain potentials; the plan is
  // mu_i nu_j exp((u_i + v_j - c_ij) / epsilon).
  std::vector<double> u;
  std::vector<double> v;
  TransportPlan plan;
  size_t iterations = 0;
  double marginal_error = 0.0;
  bool converged = false;

  // v shifted so that its last entry is zero.
  DualPotential NormalizedV() const;
};

// Log-domain Sinkhorn iterations. `warm_v` (length nu.size()) seeds the
// target potential. If max_iter is reached the best iterate is returned with
// converged == false.
SinkhornSolution Sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostSpec& cost, const SinkhornConfig& cfg,
                          std::span<const double> warm_v = {});

// Entropic semi-dual at target potential w:
//   -eps sum_i mu_i log(sum_j nu_j exp((w_j - c_ij) / eps)) + sum_j nu_j w_j
//   - eps.
double SinkhornSemidualValue(const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu,
                             std::span<const double> w,
                             const SinkhornConfig& cfg, const CostSpec& cost);

// W_eps(mu, nu) - (W_eps(mu, mu) + W_eps(nu, nu)) / 2. Throws SolverError if
// any of the three solves fails to converge.
double DebiasedSinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostSpec& cost, const SinkhornConfig& cfg);

}  // namespace otbary

#endif  // OTBARY_OT_SINKHORN_H_
