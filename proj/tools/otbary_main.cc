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

// otbary: divergences, barycenters, k-means and rate experiments from the
// command line.
//
// Exit codes: 0 success, 2 malformed input, 3 solver failure, 4 failed
// slope assertion.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "otbary/barycenter.h"
#include "otbary/divergence.h"
#include "otbary/errors.h"
#include "otbary/experiments.h"
#include "otbary/kmeans.h"
#include "otbary/measure.h"
#include "otbary/measure_io.h"
#include "otbary/ot_exact.h"
#include "otbary/parallel.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAssertion = 4;

struct DivergenceFlags {
  std::string kind = "w";
  double p = 2.0;
  double eps = 1.0;
  double tol = 1e-6;
  size_t max_iter = 100000;
  size_t dirs = 256;
};

void AddDivergenceFlags(CLI::App* cmd, DivergenceFlags& f) {
  cmd->add_option("--kind", f.kind,
                  "w | sinkhorn | debiased | sw | maxsw")
      ->capture_default_str();
  cmd->add_option("--p", f.p, "Cost exponent")->capture_default_str();
  cmd->add_option("--eps", f.eps, "Entropic regularization")
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "Sinkhorn marginal tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Sinkhorn iteration cap")
      ->capture_default_str();
  cmd->add_option("--dirs", f.dirs, "Monte-Carlo directions for sw")
      ->capture_default_str();
}

otbary::DivergenceSpec MakeSpec(const DivergenceFlags& f, uint64_t seed) {
  using otbary::DivergenceKind;
  using otbary::DivergenceSpec;
  otbary::SinkhornConfig cfg;
  cfg.epsilon = f.eps;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  switch (otbary::ParseDivergenceKind(f.kind)) {
    case DivergenceKind::kWasserstein:
      return DivergenceSpec::Wasserstein(f.p);
    case DivergenceKind::kSinkhorn:
      return DivergenceSpec::Sinkhorn(f.p, cfg);
    case DivergenceKind::kDebiasedSinkhorn:
      return DivergenceSpec::DebiasedSinkhorn(f.p, cfg);
    case DivergenceKind::kSliced:
      return DivergenceSpec::Sliced(
          f.p, otbary::DirectionSet::MonteCarlo(seed, f.dirs));
    case DivergenceKind::kMaxSliced:
      return DivergenceSpec::MaxSliced(
          f.p, otbary::DirectionSet::MonteCarlo(seed, f.dirs));
  }
  throw otbary::InputError("unknown divergence kind");
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw otbary::InputError("cannot write " + path);
  out << text;
  if (!out) throw otbary::InputError("cannot write " + path);
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw otbary::InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunDivergence(const std::string& mu_path, const std::string& nu_path,
                  const DivergenceFlags& flags, uint64_t seed,
                  const std::string& dump_plan) {
  const otbary::DiscreteMeasure mu = otbary::LoadMeasure(mu_path);
  const otbary::DiscreteMeasure nu = otbary::LoadMeasure(nu_path);
  const otbary::DivergenceSpec spec = MakeSpec(flags, seed);
  const otbary::DivergenceValue v = otbary::EvaluateDivergence(mu, nu, spec);
  json out;
  out["value"] = v.value;
  if (spec.kind() == otbary::DivergenceKind::kSliced) {
    out["std_error"] = v.std_error;
  }
  if (!dump_plan.empty()) {
    if (spec.kind() != otbary::DivergenceKind::kWasserstein) {
      throw otbary::InputError("--dump-plan needs --kind w");
    }
    const otbary::ExactOtResult r =
        otbary::SolveDiscreteOt(mu, nu, spec.cost());
    std::string csv = "row,col,mass\n";
    for (const auto& e : r.plan.entries()) {
      csv += std::to_string(e.row) + "," + std::to_string(e.col) + "," +
             otbary::FormatDouble(e.mass) + "\n";
    }
    WriteText(dump_plan, csv);
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

std::vector<double> ReadWeightsJson(const std::string& path) {
  const json j = json::parse(ReadText(path));
  const json& w = j.is_object() ? j.at("weights") : j;
  return w.get<std::vector<double>>();
}

std::vector<otbary::Point> ReadSupportJson(const std::string& path) {
  const json j = json::parse(ReadText(path));
  const json& pts = j.is_object() ? j.at("points") : j;
  std::vector<otbary::Point> support;
  for (const json& p : pts) {
    if (p.is_number()) {
      support.push_back({p.get<double>()});
    } else {
      support.push_back(p.get<otbary::Point>());
    }
  }
  return support;
}

otbary::BarycenterConstraint ParseConstraint(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw otbary::InputError("--constraint must be sparse:N, free:FILE or "
                             "fixed:FILE");
  }
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  if (kind == "sparse") {
    size_t pos = 0;
    unsigned long long n = 0;
    try {
      n = std::stoull(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != arg.size() || n == 0) {
      throw otbary::InputError("sparse:N needs a positive integer");
    }
    return otbary::SparseConstraint{static_cast<size_t>(n)};
  }
  if (kind == "free") return otbary::FreeSupportConstraint{ReadWeightsJson(arg)};
  if (kind == "fixed") {
    return otbary::FixedSupportConstraint{ReadSupportJson(arg)};
  }
  throw otbary::InputError("unknown constraint '" + kind + "'");
}

int RunBarycenter(const std::vector<std::string>& paths,
                  const std::string& constraint_text,
                  const DivergenceFlags& flags, uint64_t seed,
                  const otbary::BarycenterOptions& options,
                  const std::string& out_path) {
  std::vector<otbary::DiscreteMeasure> targets;
  for (const auto& p : paths) targets.push_back(otbary::LoadMeasure(p));
  const otbary::BarycenterConstraint constraint =
      ParseConstraint(constraint_text);
  const otbary::BarycenterSolution sol = otbary::SolveBarycenter(
      targets, constraint, MakeSpec(flags, seed), seed, options);
  const std::string text = otbary::BarycenterToJson(sol);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    WriteText(out_path, text + "\n");
    json out;
    out["cost"] = sol.cost;
    std::cout << out.dump() << "\n";
  }
  return kExitOk;
}

int RunKMeans(const std::string& path, size_t n, uint64_t seed,
              size_t restarts, size_t iters, const std::string& out_path) {
  const otbary::DiscreteMeasure samples = otbary::LoadMeasure(path);
  const otbary::KMeansResult r =
      otbary::LloydBestOf(samples, n, seed, restarts, iters);
  if (out_path.empty()) {
    std::string csv;
    for (const auto& c : r.centroids) {
      for (size_t k = 0; k < c.size(); ++k) {
        if (k > 0) csv += ",";
        csv += otbary::FormatDouble(c[k]);
      }
      csv += "\n";
    }
    std::cout << csv;
  } else {
    otbary::WritePointsCsv(out_path, r.centroids);
    json out;
    out["cost"] = r.cost;
    out["iterations"] = r.iterations;
    std::cout << out.dump() << "\n";
  }
  return kExitOk;
}

int RunRates(const std::string& config_path, const std::string& axis_name,
             const std::string& out_dir, std::optional<uint64_t> seed,
             const std::vector<double>& assert_slope, bool omit_timing) {
  otbary::ExperimentConfig cfg = otbary::ExperimentConfig::FromFile(config_path);
  if (seed) cfg.seed = *seed;
  if (omit_timing) cfg.record_timing = false;
  otbary::ExperimentAxis axis;
  if (axis_name == "n") {
    axis = otbary::ExperimentAxis::kSamples;
  } else if (axis_name == "N") {
    axis = otbary::ExperimentAxis::kSupport;
  } else {
    throw otbary::InputError("--axis must be n or N");
  }
  cfg.Validate(axis);

  const std::vector<otbary::ExperimentRecord> records =
      otbary::RunExperiment(cfg, axis);
  std::optional<otbary::SlopeReport> slope;
  try {
    slope = otbary::EstimateSlope(records);
  } catch (const otbary::InputError& e) {
    std::cerr << "otbary: no slope: " << e.what() << "\n";
  }

  json extra;
  extra["axis"] = axis_name;
  extra["config"] = json::parse(cfg.ToJson());
  json laws = json::array();
  for (const auto& law : otbary::DrawTargetLaws(cfg)) {
    laws.push_back({{"mean", law.mean}, {"covariance", law.covariance}});
  }
  extra["target_laws"] = laws;
  const double reference_slope =
      axis == otbary::ExperimentAxis::kSamples ? -0.5 : 0.5;
  if (!out_dir.empty()) {
    otbary::WriteResults(records, slope, out_dir, cfg.kind, reference_slope,
                         extra.dump());
  }

  if (slope) {
    std::cout << otbary::SlopeToJson(*slope) << "\n";
  } else {
    std::cout << "{\"slope\": null}\n";
  }
  if (!assert_slope.empty()) {
    const bool ok = slope && slope->slope >= assert_slope[0] &&
                    slope->slope <= assert_slope[1];
    if (!ok) {
      std::cerr << "otbary: slope outside [" << assert_slope[0] << ", "
                << assert_slope[1] << "]\n";
      return kExitAssertion;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport divergences and sparse barycenters"};
  app.require_subcommand(1);
  size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: hardware)");

  DivergenceFlags div_flags;
  uint64_t seed = 0;

  auto* div = app.add_subcommand("divergence",
                                 "Divergence between two measure files");
  std::string mu_path;
  std::string nu_path;
  std::string dump_plan;
  div->add_option("mu", mu_path, "First measure (.json or .csv)")->required();
  div->add_option("nu", nu_path, "Second measure (.json or .csv)")->required();
  AddDivergenceFlags(div, div_flags);
  div->add_option("--seed", seed, "Seed for random directions");
  div->add_option("--dump-plan", dump_plan, "Write the exact plan as CSV");

  auto* bary = app.add_subcommand("barycenter", "Barycenter of measure files");
  std::vector<std::string> target_paths;
  std::string constraint;
  std::string bary_out;
  otbary::BarycenterOptions options;
  bary->add_option("targets", target_paths, "Target measures")->required();
  bary->add_option("--constraint", constraint,
                   "sparse:N | free:weights.json | fixed:support.json")
      ->required();
  AddDivergenceFlags(bary, div_flags);
  bary->add_option("--seed", seed, "Seed for initialization");
  bary->add_option("--out", bary_out, "Solution JSON path");
  bary->add_option("--restarts", options.restarts, "k-means++ restarts")
      ->capture_default_str();
  bary->add_option("--max-outer", options.max_outer, "Outer iteration cap")
      ->capture_default_str();

  auto* kmeans = app.add_subcommand("kmeans", "Lloyd's algorithm on samples");
  std::string samples_path;
  size_t kmeans_n = 0;
  size_t kmeans_restarts = 10;
  size_t kmeans_iters = 300;
  std::string kmeans_out;
  kmeans->add_option("samples", samples_path, "Samples (.csv or .json)")
      ->required();
  kmeans->add_option("--n", kmeans_n, "Number of centroids")->required();
  kmeans->add_option("--seed", seed, "Seed");
  kmeans->add_option("--restarts", kmeans_restarts, "Best of this many runs")
      ->capture_default_str();
  kmeans->add_option("--iters", kmeans_iters, "Lloyd iteration cap")
      ->capture_default_str();
  kmeans->add_option("--out", kmeans_out, "Centroid CSV path");

  auto* rates = app.add_subcommand("rates", "Rate-of-convergence experiment");
  std::string config_path;
  std::string axis = "n";
  std::string rates_out;
  std::optional<uint64_t> rates_seed;
  std::vector<double> assert_slope;
  bool omit_timing = false;
  rates->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  rates->add_option("--axis", axis, "n or N")->capture_default_str();
  rates->add_option("--out", rates_out, "Output directory");
  rates->add_option("--seed", rates_seed, "Override the config seed");
  rates->add_option("--assert-slope", assert_slope,
                    "Fail with exit 4 unless lo <= slope <= hi")
      ->expected(2);
  rates->add_flag("--omit-timing", omit_timing,
                  "Write 0 for wall_time_ms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (threads > 0) otbary::SetNumThreads(threads);
    if (div->parsed()) {
      return RunDivergence(mu_path, nu_path, div_flags, seed, dump_plan);
    }
    if (bary->parsed()) {
      return RunBarycenter(target_paths, constraint, div_flags, seed, options,
                           bary_out);
    }
    if (kmeans->parsed()) {
      return RunKMeans(samples_path, kmeans_n, seed, kmeans_restarts,
                       kmeans_iters, kmeans_out);
    }
    if (rates->parsed()) {
      return RunRates(config_path, axis, rates_out, rates_seed, assert_slope,
                      omit_timing);
    }
  } catch (const otbary::SolverError& e) {
    std::cerr << "otbary: solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const otbary::InputError& e) {
    std::cerr << "otbary: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "otbary: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "otbary: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitInput;
}
