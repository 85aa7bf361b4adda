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

#include "otbary/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "otbary/errors.h"
#include "otbary/parallel.h"
#include "otbary/random.h"

namespace otbary {
namespace {

using nlohmann::json;

// Stream identifiers for DeriveSeed.
enum Stream : uint64_t {
  kLawStream = 1,
  kReferenceSamples = 2,
  kReferenceSolve = 3,
  kCellSamples = 4,
  kCellSolve = 5,
};

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void CheckKeys(const json& j, std::initializer_list<const char*> allowed,
               const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw InputError("unknown key '" + key + "' in " + where);
    }
  }
}

void CheckGrid(const std::vector<size_t>& grid, const char* name) {
  if (grid.size() < 3) {
    throw InputError(std::string(name) +
                     " needs at least 3 points to fit a slope");
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0) throw InputError(std::string(name) + " must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw InputError(std::string(name) + " must be strictly increasing");
    }
  }
}

std::vector<DiscreteMeasure> DrawTargets(const ExperimentConfig& cfg,
                                         const std::vector<TargetLaw>& laws,
                                         size_t n, uint64_t seed) {
  std::vector<DiscreteMeasure> out;
  out.reserve(laws.size());
  for (size_t l = 0; l < laws.size(); ++l) {
    const uint64_t s = DeriveSeed(seed, {l});
    std::vector<double> coords;
    if (cfg.law.covariance == "zero") {
      for (size_t i = 0; i < n; ++i) {
        coords.insert(coords.end(), laws[l].mean.begin(), laws[l].mean.end());
      }
    } else {
      coords = SampleGaussianFlat(
          GaussianSpec::Create(laws[l].mean, laws[l].covariance), n, s);
    }
    out.push_back(DiscreteMeasure::UniformFlat(cfg.d, std::move(coords)));
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  ExperimentConfig c;
  try {
    CheckKeys(j,
              {"d", "L", "n_grid", "N", "N_grid", "n", "replications",
               "divergence", "gaussian_law", "n_ref", "restarts",
               "reference_restarts", "reference_polish_outer", "solver", "statistical_slack", "seed",
               "record_timing"},
              "config");
    Read(j, "d", c.d);
    Read(j, "L", c.L);
    Read(j, "n_grid", c.n_grid);
    Read(j, "N", c.N);
    Read(j, "N_grid", c.N_grid);
    Read(j, "n", c.n);
    Read(j, "replications", c.replications);
    Read(j, "n_ref", c.n_ref);
    Read(j, "restarts", c.restarts);
    Read(j, "reference_restarts", c.reference_restarts);
    Read(j, "reference_polish_outer", c.reference_polish_outer);
    Read(j, "statistical_slack", c.statistical_slack);
    Read(j, "seed", c.seed);
    Read(j, "record_timing", c.record_timing);
    if (j.contains("divergence")) {
      const json& d = j.at("divergence");
      CheckKeys(d, {"kind", "p", "epsilon", "tol", "max_iter", "directions"},
                "divergence");
      Read(d, "kind", c.kind);
      Read(d, "p", c.p);
      Read(d, "epsilon", c.epsilon);
      Read(d, "tol", c.sinkhorn_tol);
      Read(d, "max_iter", c.sinkhorn_max_iter);
      Read(d, "directions", c.directions);
    }
    if (j.contains("gaussian_law")) {
      const json& g = j.at("gaussian_law");
      CheckKeys(g, {"mean_scale", "covariance", "jitter"}, "gaussian_law");
      Read(g, "mean_scale", c.law.mean_scale);
      Read(g, "covariance", c.law.covariance);
      Read(g, "jitter", c.law.jitter);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      CheckKeys(s, {"max_outer", "rel_tol", "sparse_weight_iters"}, "solver");
      Read(s, "max_outer", c.max_outer);
      Read(s, "rel_tol", c.rel_tol);
      Read(s, "sparse_weight_iters", c.sparse_weight_iters);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  if (c.law.covariance != "wishart" && c.law.covariance != "identity" &&
      c.law.covariance != "zero") {
    throw InputError("gaussian_law.covariance must be wishart, identity or "
                     "zero");
  }
  ParseDivergenceKind(c.kind);
  return c;
}

ExperimentConfig ExperimentConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

std::string ExperimentConfig::ToJson() const {
  json j;
  j["d"] = d;
  j["L"] = L;
  j["n_grid"] = n_grid;
  j["N"] = N;
  j["N_grid"] = N_grid;
  j["n"] = n;
  j["replications"] = replications;
  j["divergence"] = {{"kind", kind},
                     {"p", p},
                     {"epsilon", epsilon},
                     {"tol", sinkhorn_tol},
                     {"max_iter", sinkhorn_max_iter},
                     {"directions", directions}};
  j["gaussian_law"] = {{"mean_scale", law.mean_scale},
                       {"covariance", law.covariance},
                       {"jitter", law.jitter}};
  j["n_ref"] = n_ref;
  j["restarts"] = restarts;
  j["reference_restarts"] = reference_restarts;
  j["reference_polish_outer"] = reference_polish_outer;
  j["solver"] = {{"max_outer", max_outer},
                 {"rel_tol", rel_tol},
                 {"sparse_weight_iters", sparse_weight_iters}};
  j["statistical_slack"] = statistical_slack;
  j["seed"] = seed;
  j["record_timing"] = record_timing;
  return j.dump(2);
}

size_t ExperimentConfig::ReferenceSize(ExperimentAxis axis) const {
  if (n_ref > 0) return n_ref;
  const size_t largest =
      axis == ExperimentAxis::kSamples
          ? (n_grid.empty() ? 0 : *std::max_element(n_grid.begin(), n_grid.end()))
          : n;
  return 20 * largest;
}

DivergenceSpec ExperimentConfig::Divergence() const {
  SinkhornConfig sc;
  sc.epsilon = epsilon;
  sc.tol = sinkhorn_tol;
  sc.max_iter = sinkhorn_max_iter;
  switch (ParseDivergenceKind(kind)) {
    case DivergenceKind::kWasserstein:
      return DivergenceSpec::Wasserstein(p);
    case DivergenceKind::kSinkhorn:
      return DivergenceSpec::Sinkhorn(p, sc);
    case DivergenceKind::kDebiasedSinkhorn:
      return DivergenceSpec::DebiasedSinkhorn(p, sc);
    case DivergenceKind::kSliced:
      return DivergenceSpec::Sliced(
          p, DirectionSet::MonteCarlo(DeriveSeed(seed, {99}), directions));
    case DivergenceKind::kMaxSliced:
      return DivergenceSpec::MaxSliced(
          p, DirectionSet::MonteCarlo(DeriveSeed(seed, {99}), directions));
  }
  throw InputError("unknown divergence kind");
}

BarycenterOptions ExperimentConfig::Options(size_t restart_count) const {
  BarycenterOptions o;
  o.max_outer = max_outer;
  o.rel_tol = rel_tol;
  o.sparse_weight_iters = sparse_weight_iters;
  o.restarts = restart_count;
  return o;
}

void ExperimentConfig::Validate(ExperimentAxis axis) const {
  if (d == 0 || L == 0) throw InputError("d and L must be positive");
  if (replications < 2) throw InputError("replications must be >= 2");
  if (restarts == 0) throw InputError("restarts must be >= 1");
  const DivergenceKind k = ParseDivergenceKind(kind);
  if (k != DivergenceKind::kWasserstein && k != DivergenceKind::kSinkhorn) {
    throw InputError("rate experiments fit sparse barycenters, which need "
                     "kind wasserstein or sinkhorn");
  }
  size_t largest = 0;
  if (axis == ExperimentAxis::kSamples) {
    CheckGrid(n_grid, "n_grid");
    if (N == 0) throw InputError("N must be positive");
    largest = n_grid.back();
  } else {
    CheckGrid(N_grid, "N_grid");
    if (n == 0) throw InputError("n must be positive");
    largest = n;
  }
  if (ReferenceSize(axis) < 10 * largest) {
    throw InputError("n_ref must be at least 10 x the largest sample size");
  }
  Divergence();
}

std::vector<TargetLaw> DrawTargetLaws(const ExperimentConfig& cfg) {
  std::vector<TargetLaw> laws(cfg.L);
  for (size_t l = 0; l < cfg.L; ++l) {
    Rng rng = MakeRng(DeriveSeed(cfg.seed, {kLawStream, l}));
    std::uniform_real_distribution<double> unif(-cfg.law.mean_scale,
                                                cfg.law.mean_scale);
    std::normal_distribution<double> normal;
    TargetLaw& t = laws[l];
    t.mean.resize(cfg.d);
    for (double& m : t.mean) m = cfg.law.mean_scale > 0.0 ? unif(rng) : 0.0;
    const size_t d = cfg.d;
    t.covariance.assign(d * d, 0.0);
    if (cfg.law.covariance == "wishart") {
      std::vector<double> a(d * d);
      for (double& x : a) x = normal(rng);
      for (size_t r = 0; r < d; ++r) {
        for (size_t c = 0; c < d; ++c) {
          double s = 0.0;
          for (size_t k = 0; k < d; ++k) s += a[r * d + k] * a[c * d + k];
          t.covariance[r * d + c] = s;
        }
        t.covariance[r * d + r] += cfg.law.jitter;
      }
    } else if (cfg.law.covariance == "identity") {
      for (size_t r = 0; r < d; ++r) t.covariance[r * d + r] = 1.0;
    }
  }
  return laws;
}

std::vector<ExperimentRecord> RunExperiment(const ExperimentConfig& cfg,
                                            ExperimentAxis axis) {
  cfg.Validate(axis);
  const DivergenceSpec spec = cfg.Divergence();
  const std::vector<TargetLaw> laws = DrawTargetLaws(cfg);
  const size_t n_ref = cfg.ReferenceSize(axis);
  const std::vector<DiscreteMeasure> reference =
      DrawTargets(cfg, laws, n_ref, DeriveSeed(cfg.seed, {kReferenceSamples}));

  const std::vector<size_t>& grid =
      axis == ExperimentAxis::kSamples ? cfg.n_grid : cfg.N_grid;
  auto support_size = [&](size_t a) {
    return axis == ExperimentAxis::kSamples ? cfg.N : grid[a];
  };
  auto sample_size = [&](size_t a) {
    return axis == ExperimentAxis::kSamples ? grid[a] : cfg.n;
  };

  const size_t cells = grid.size() * cfg.replications;
  std::vector<ExperimentRecord> records(cells);
  std::vector<BarycenterSolution> fits(cells);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ParallelFor(cells, [&](size_t c) {
    const size_t a = c / cfg.replications;
    const size_t rep = c % cfg.replications;
    ExperimentRecord& rec = records[c];
    rec.axis = static_cast<double>(grid[a]);
    rec.replication = rep;
    rec.empirical_cost = nan;
    rec.population_cost_estimate = nan;
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::vector<DiscreteMeasure> sample = DrawTargets(
          cfg, laws, sample_size(a),
          DeriveSeed(cfg.seed, {kCellSamples, grid[a], rep}));
      fits[c] = SolveSparse(sample, support_size(a), spec,
                            DeriveSeed(cfg.seed, {kCellSolve, grid[a], rep}),
                            cfg.Options(cfg.restarts));
      rec.empirical_cost = fits[c].cost;
      rec.population_cost_estimate =
          BaryCost(reference, fits[c].ToMeasure(), spec);
    } catch (const Error&) {
      rec.empirical_cost = nan;
      rec.population_cost_estimate = nan;
    }
    if (cfg.record_timing) {
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    }
  });

  // The population optimum depends only on the support size. Its estimate is
  // the best reference-sample cost among an optional direct solve, the
  // fitted cells, and a refinement of the best fitted cell.
  const size_t groups = axis == ExperimentAxis::kSamples ? 1 : grid.size();
  auto group_of = [&](size_t c) {
    return axis == ExperimentAxis::kSamples ? 0 : c / cfg.replications;
  };
  std::vector<double> optimum(groups, std::numeric_limits<double>::infinity());
  std::vector<size_t> best_cell(groups, cells);
  for (size_t c = 0; c < cells; ++c) {
    const double v = records[c].population_cost_estimate;
    const size_t g = group_of(c);
    if (std::isfinite(v) && v < optimum[g]) {
      optimum[g] = v;
      best_cell[g] = c;
    }
  }
  for (size_t g = 0; g < groups; ++g) {
    const size_t big_n = axis == ExperimentAxis::kSamples ? cfg.N : grid[g];
    try {
      if (cfg.reference_restarts > 0) {
        optimum[g] = std::min(
            optimum[g],
            SolveSparse(reference, big_n, spec,
                        DeriveSeed(cfg.seed, {kReferenceSolve, big_n}),
                        cfg.Options(cfg.reference_restarts))
                .cost);
      }
      if (best_cell[g] < cells && cfg.reference_polish_outer > 0) {
        BarycenterOptions polish = cfg.Options(1);
        polish.max_outer = cfg.reference_polish_outer;
        optimum[g] = std::min(
            optimum[g],
            RefineSparse(reference, fits[best_cell[g]], spec, polish).cost);
      }
    } catch (const Error&) {
      // Falls back to the best fitted cell.
    }
    if (!std::isfinite(optimum[g])) optimum[g] = nan;
  }

  for (size_t c = 0; c < cells; ++c) {
    ExperimentRecord& rec = records[c];
    rec.reference_optimum_estimate = optimum[group_of(c)];
    rec.estimation_error =
        rec.population_cost_estimate - rec.reference_optimum_estimate;
  }
  return records;
}

std::vector<ExperimentRecord> RunRateInN(const ExperimentConfig& cfg) {
  return RunExperiment(cfg, ExperimentAxis::kSamples);
}

std::vector<ExperimentRecord> RunRateInSupport(const ExperimentConfig& cfg) {
  return RunExperiment(cfg, ExperimentAxis::kSupport);
}

}  // namespace otbary
