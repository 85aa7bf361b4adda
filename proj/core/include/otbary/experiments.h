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

#ifndef OTBARY_EXPERIMENTS_H_
#define OTBARY_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otbary/barycenter.h"
#include "otbary/divergence.h"
#include "otbary/measure.h"

namespace otbary {

// How the L target Gaussians are drawn from the experiment seed.
struct GaussianLaw {
  // Means uniform in [-mean_scale, mean_scale]^d.
  double mean_scale = 2.0;
  // "wishart": A A^T + jitter I with standard normal A; "identity"; "zero"
  // (every sample sits at the mean).
  std::string covariance = "wishart";
  double jitter = 0.1;
};

enum class ExperimentAxis { kSamples, kSupport };

struct ExperimentConfig {
  size_t d = 2;
  size_t L = 3;
  // Axis n: sample sizes, with the support size N held fixed.
  std::vector<size_t> n_grid;
  size_t N = 10;
  // Axis N: support sizes, with the sample size n held fixed.
  std::vector<size_t> N_grid;
  size_t n = 500;
  size_t replications = 20;

  std::string kind = "wasserstein";
  double p = 2.0;
  double epsilon = 1.0;
  double sinkhorn_tol = 1e-6;
  size_t sinkhorn_max_iter = 100000;
  size_t directions = 256;

  GaussianLaw law;
  // Reference sample size per target; 0 means 20 x the largest sample size.
  size_t n_ref = 0;
  size_t restarts = 5;
  // Restarts of a direct sparse solve on the reference sample; 0 skips it.
  size_t reference_restarts = 5;
  // Outer rounds refining the best fitted cell on the reference sample;
  // 0 skips it.
  size_t reference_polish_outer = 20;
  size_t max_outer = 200;
  double rel_tol = 1e-7;
  size_t sparse_weight_iters = 25;
  // Per-record estimation errors below -statistical_slack are reported.
  double statistical_slack = 0.05;
  uint64_t seed = 0;
  // false writes 0 for wall_time_ms so that outputs are byte-identical.
  bool record_timing = true;

  // Unknown keys are rejected. Throws InputError on malformed input.
  static ExperimentConfig FromJson(const std::string& text);
  static ExperimentConfig FromFile(const std::string& path);
  std::string ToJson() const;

  size_t ReferenceSize(ExperimentAxis axis) const;
  DivergenceSpec Divergence() const;
  BarycenterOptions Options(size_t restarts) const;
  // Throws InputError if the grid for `axis` has fewer than 3 points, is not
  // strictly increasing, or the other invariants fail.
  void Validate(ExperimentAxis axis) const;
};

struct ExperimentRecord {
  double axis = 0.0;
  size_t replication = 0;
  double empirical_cost = 0.0;
  double population_cost_estimate = 0.0;
  double reference_optimum_estimate = 0.0;
  double estimation_error = 0.0;
  double wall_time_ms = 0.0;
};

// Targets drawn for an experiment, echoed into the summary.
struct TargetLaw {
  Point mean;
  std::vector<double> covariance;
};
std::vector<TargetLaw> DrawTargetLaws(const ExperimentConfig& cfg);

// One record per (axis value, replication), sorted by axis then replication.
// Cells whose solver fails carry NaN numeric fields.
std::vector<ExperimentRecord> RunRateInN(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> RunRateInSupport(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> RunExperiment(const ExperimentConfig& cfg,
                                            ExperimentAxis axis);

struct AxisSummary {
  double axis = 0.0;
  size_t count = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  // 1.96 standard errors.
  double ci_half_width = 0.0;
};

struct SlopeReport {
  double slope = 0.0;
  double intercept = 0.0;
  // 95% normal-approximation half-widths, propagated from the replication
  // scatter of each axis mean.
  double slope_half_width = 0.0;
  double intercept_half_width = 0.0;
  std::vector<AxisSummary> points;
  // Axis values left out because their mean error was not positive.
  std::vector<double> excluded;
};

// Per-axis means and standard errors over finite records.
std::vector<AxisSummary> SummarizeByAxis(
    const std::vector<ExperimentRecord>& records);

// OLS of log mean error on log axis. Throws InputError with fewer than 3
// usable axis values.
SlopeReport EstimateSlope(const std::vector<ExperimentRecord>& records);

// Writes <dir>/results.csv, <dir>/summary.json and, if there are records,
// <dir>/chart.svg. `summary_extra` is merged into the JSON summary.
void WriteResults(const std::vector<ExperimentRecord>& records,
                  const std::optional<SlopeReport>& slope,
                  const std::string& dir, const std::string& series,
                  double reference_slope,
                  const std::string& summary_extra = "{}");

std::string RecordsToCsv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> RecordsFromCsv(const std::string& text);
std::vector<ExperimentRecord> ReadRecordsCsv(const std::string& path);
std::string SlopeToJson(const SlopeReport& slope);
std::string RenderChartSvg(const std::vector<ExperimentRecord>& records,
                           const std::string& series, double reference_slope);

}  // namespace otbary

#endif  // OTBARY_EXPERIMENTS_H_
