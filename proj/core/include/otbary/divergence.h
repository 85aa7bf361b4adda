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

#ifndef OTBARY_DIVERGENCE_H_
#define OTBARY_DIVERGENCE_H_

#include <optional>
#include <string>

#include "otbary/measure.h"
#include "otbary/ot_exact.h"
#include "otbary/ot_sinkhorn.h"
#include "otbary/ot_sliced.h"

namespace otbary {

enum class DivergenceKind {
  kWasserstein,
  kSinkhorn,
  kDebiasedSinkhorn,
  kSliced,
  kMaxSliced,
};

// Accepts the long names (wasserstein, sinkhorn, debiased_sinkhorn, sliced,
// max_sliced) and the CLI short names (w, sinkhorn, debiased, sw, maxsw).
DivergenceKind ParseDivergenceKind(const std::string& name);
std::string DivergenceKindName(DivergenceKind kind);

class DivergenceSpec {
 public:
  static DivergenceSpec Wasserstein(double p);
  static DivergenceSpec Sinkhorn(double p, SinkhornConfig cfg);
  static DivergenceSpec DebiasedSinkhorn(double p, SinkhornConfig cfg);
  static DivergenceSpec Sliced(double p, DirectionSet dirs);
  // The direction set's seed drives the search; `search` sets its budget.
  static DivergenceSpec MaxSliced(double p, DirectionSet dirs,
                                  MaxSlicedOptions search = {});

  DivergenceKind kind() const { return kind_; }
  const CostSpec& cost() const { return cost_; }
  const std::optional<SinkhornConfig>& sinkhorn() const { return sinkhorn_; }
  const std::optional<DirectionSet>& dirs() const { return dirs_; }
  const MaxSlicedOptions& search() const { return search_; }

 private:
  DivergenceSpec(DivergenceKind kind, CostSpec cost) : kind_(kind), cost_(cost) {}

  DivergenceKind kind_;
  CostSpec cost_;
  std::optional<SinkhornConfig> sinkhorn_;
  std::optional<DirectionSet> dirs_;
  MaxSlicedOptions search_;
};

struct DivergenceValue {
  double value = 0.0;
  // Monte-Carlo standard error; zero for deterministic kinds.
  double std_error = 0.0;
};

// Both measures are canonicalized first. Throws SolverError if an exact solve
// hits its pivot cap or a Sinkhorn solve does not converge.
DivergenceValue EvaluateDivergence(const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu,
                                   const DivergenceSpec& spec);

}  // namespace otbary

#endif  // OTBARY_DIVERGENCE_H_
