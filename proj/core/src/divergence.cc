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

#include "otbary/divergence.h"

#include <string>

#include "otbary/errors.h"

namespace otbary {

DivergenceKind ParseDivergenceKind(const std::string& name) {
  if (name == "w" || name == "wasserstein") return DivergenceKind::kWasserstein;
  if (name == "sinkhorn") return DivergenceKind::kSinkhorn;
  if (name == "debiased" || name == "debiased_sinkhorn") {
    return DivergenceKind::kDebiasedSinkhorn;
  }
  if (name == "sw" || name == "sliced") return DivergenceKind::kSliced;
  if (name == "maxsw" || name == "max_sliced") return DivergenceKind::kMaxSliced;
  throw InputError("unknown divergence kind '" + name + "'");
}

std::string DivergenceKindName(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kWasserstein:
      return "wasserstein";
    case DivergenceKind::kSinkhorn:
      return "sinkhorn";
    case DivergenceKind::kDebiasedSinkhorn:
      return "debiased_sinkhorn";
    case DivergenceKind::kSliced:
      return "sliced";
    case DivergenceKind::kMaxSliced:
      return "max_sliced";
  }
  return "unknown";
}

DivergenceSpec DivergenceSpec::Wasserstein(double p) {
  return DivergenceSpec(DivergenceKind::kWasserstein, CostSpec::Create(p));
}

DivergenceSpec DivergenceSpec::Sinkhorn(double p, SinkhornConfig cfg) {
  cfg.Validate();
  DivergenceSpec s(DivergenceKind::kSinkhorn, CostSpec::Create(p));
  s.sinkhorn_ = cfg;
  return s;
}

DivergenceSpec DivergenceSpec::DebiasedSinkhorn(double p, SinkhornConfig cfg) {
  cfg.Validate();
  DivergenceSpec s(DivergenceKind::kDebiasedSinkhorn, CostSpec::Create(p));
  s.sinkhorn_ = cfg;
  return s;
}

DivergenceSpec DivergenceSpec::Sliced(double p, DirectionSet dirs) {
  DivergenceSpec s(DivergenceKind::kSliced, CostSpec::Create(p));
  s.dirs_ = std::move(dirs);
  return s;
}

DivergenceSpec DivergenceSpec::MaxSliced(double p, DirectionSet dirs,
                                         MaxSlicedOptions search) {
  DivergenceSpec s(DivergenceKind::kMaxSliced, CostSpec::Create(p));
  search.seed = dirs.seed();
  s.dirs_ = std::move(dirs);
  s.search_ = search;
  return s;
}

DivergenceValue EvaluateDivergence(const DiscreteMeasure& raw_mu,
                                   const DiscreteMeasure& raw_nu,
                                   const DivergenceSpec& spec) {
  const DiscreteMeasure mu = Canonicalize(raw_mu);
  const DiscreteMeasure nu = Canonicalize(raw_nu);
  switch (spec.kind()) {
    case DivergenceKind::kWasserstein:
      return {SolveDiscreteOt(mu, nu, spec.cost()).value, 0.0};
    case DivergenceKind::kSinkhorn: {
      const SinkhornSolution s = Sinkhorn(mu, nu, spec.cost(), *spec.sinkhorn());
      if (!s.converged) {
        throw SolverError("sinkhorn did not converge (marginal error " +
                          std::to_string(s.marginal_error) + ")");
      }
      return {s.value, 0.0};
    }
    case DivergenceKind::kDebiasedSinkhorn:
      return {otbary::DebiasedSinkhorn(mu, nu, spec.cost(), *spec.sinkhorn()),
              0.0};
    case DivergenceKind::kSliced: {
      const SlicedResult r = SlicedW(mu, nu, spec.cost(), *spec.dirs());
      return {r.value, r.std_error};
    }
    case DivergenceKind::kMaxSliced:
      return {MaxSlicedW(mu, nu, spec.cost(), spec.search()).value, 0.0};
  }
  throw InputError("unknown divergence kind");
}

}  // namespace otbary
