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

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otbary/barycenter.h"
#include "otbary/divergence.h"
#include "otbary/experiments.h"
#include "otbary/kmeans.h"
#include "otbary/measure.h"
#include "otbary/ot_1d.h"
#include "otbary/ot_exact.h"
#include "otbary/ot_sinkhorn.h"
#include "otbary/ot_sliced.h"

namespace {

using namespace otbary;
namespace fs = std::filesystem;

constexpr double kOracleTol = 1e-8;
constexpr double kOneDimTol = 1e-9;
constexpr double kDualityTol = 1e-8;
constexpr double kWeakDualityTol = 1e-10;
constexpr double kExactBoundSlack = 1e-6;
constexpr double kSinkhornBoundSlack = 1e-4;
constexpr double kInvarianceTol = 1e-9;
constexpr double kMarginalTol = 1e-6;
constexpr double kDiracTol = 1e-9;
constexpr double kSmallEpsTol = 5e-2;
constexpr double kDebiasedZeroTol = 1e-8;
constexpr double kSymmetryTol = 1e-9;
constexpr double kStdErrors = 3.0;
constexpr double kMaxSlicedGridTol = 1e-4;
constexpr double kQuantizationTol = 1e-9;
constexpr double kLloydTol = 1e-9;
constexpr double kDescentTol = 1e-9;
constexpr double kFastSeconds = 10.0;
constexpr double kRateNSeconds = 15 * 60.0;
constexpr double kRateSupportSeconds = 20 * 60.0;
constexpr double kRateNLo = -0.8;
constexpr double kRateNHi = -0.3;
constexpr double kRateSupportLo = -0.23;
constexpr double kRateSupportHi = 0.8;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && pass_) {
      pass_ = false;
      first_failure_ = what;
    }
    if (!ok) ++failures_;
  }
  void Track(const std::string& name, double value) {
    auto it = std::find_if(stats_.begin(), stats_.end(),
                           [&](const auto& s) { return s.first == name; });
    if (it == stats_.end()) {
      stats_.emplace_back(name, value);
    } else {
      it->second = std::max(it->second, value);
    }
  }
  Outcome Done() const {
    std::ostringstream s;
    s.precision(3);
    bool first = true;
    for (const auto& [name, value] : stats_) {
      s << (first ? "" : ", ") << name << " " << value;
      first = false;
    }
    if (!pass_) {
      s << (first ? "" : "; ") << failures_ << " failure(s), first: "
        << first_failure_;
    }
    return {pass_, s.str()};
  }

 private:
  bool pass_ = true;
  size_t failures_ = 0;
  std::string first_failure_;
  std::vector<std::pair<std::string, double>> stats_;
};

DiscreteMeasure RandomMeasure(std::mt19937_64& rng, size_t n, size_t d,
                              double spread = 1.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<double> coords(n * d);
  for (double& x : coords) x = spread * normal(rng);
  std::vector<double> w(n);
  for (double& x : w) x = unit(rng);
  double s = 0.0;
  for (double x : w) s += x;
  for (double& x : w) x /= s;
  return DiscreteMeasure::FromFlat(d, std::move(coords), std::move(w));
}

size_t Between(std::mt19937_64& rng, size_t lo, size_t hi) {
  return std::uniform_int_distribution<size_t>(lo, hi)(rng);
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

SinkhornConfig Entropic(double eps, double tol = 1e-9,
                        size_t max_iter = 1000000) {
  SinkhornConfig c;
  c.epsilon = eps;
  c.tol = tol;
  c.max_iter = max_iter;
  return c;
}

Outcome ExactOracle() {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  std::mt19937_64 rng(101);
  for (int t = 0; t < 200; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 6), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 6), d);
    const CostSpec cost = CostSpec::Create(t % 2 ? 1.0 : 2.0);
    const double diff = std::abs(SolveDiscreteOt(a, b, cost).value -
                                 BruteForceOt(a, b, cost));
    c.Track("max_diff", diff);
    c.Expect(diff <= kOracleTol, "instance " + std::to_string(t));
  }
  const double s = Seconds(start);
  c.Track("seconds", s);
  c.Expect(s < kFastSeconds, "runtime");
  return c.Done();
}

Outcome OneDimensional() {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  std::mt19937_64 rng(102);
  for (int t = 0; t < 200; ++t) {
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 50), 1);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 50), 1);
    const CostSpec cost = CostSpec::Create(t % 2 ? 1.0 : 2.0);
    const double diff =
        std::abs(W1d(a, b, cost) - SolveDiscreteOt(a, b, cost).value);
    c.Track("max_diff", diff);
    c.Expect(diff <= kOneDimTol, "instance " + std::to_string(t));
  }
  const double s = Seconds(start);
  c.Track("seconds", s);
  c.Expect(s < kFastSeconds, "runtime");
  return c.Done();
}

Outcome Duality() {
  Check c;
  std::mt19937_64 rng(103);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 50; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 30), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 30), d);
    const CostSpec cost = CostSpec::Create(t % 2 ? 1.0 : 2.0);
    const ExactOtResult r = SolveDiscreteOt(a, b, cost);
    const double gap = std::abs(SemidualValue(a, b, r.potentials, cost) -
                                r.value);
    c.Track("strong_gap", gap);
    c.Expect(gap <= kDualityTol, "strong duality " + std::to_string(t));
    for (int s = 0; s < 100; ++s) {
      std::vector<double> w = r.potentials.w;
      const double scale = std::pow(10.0, -static_cast<int>(s % 6));
      for (double& x : w) x += scale * normal(rng);
      const double excess = SemidualValue(a, b, w, cost) - r.value;
      c.Track("max_excess", excess);
      c.Expect(excess <= kWeakDualityTol, "weak duality " + std::to_string(t));
    }
  }
  return c.Done();
}

Outcome DualBounds() {
  Check c;
  std::mt19937_64 rng(104);
  for (int t = 0; t < 200; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 15), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 15), d);
    const double p = t % 2 ? 1.0 : 2.0;
    const CostSpec cost = CostSpec::Create(p);
    const double radius = std::max(Radius(a), Radius(b));
    const double k1 = 2.0 * p * std::pow(radius, p);
    const double k2 = 4.0 * p * std::pow(2.0 * radius, p);
    const double exact = SolveDiscreteOt(a, b, cost).potentials.SupNorm();
    c.Track("exact_ratio", exact / std::max(k1, 1e-300));
    c.Expect(exact <= k1 + kExactBoundSlack, "exact " + std::to_string(t));
    const SinkhornSolution s =
        Sinkhorn(a, b, cost, Entropic(t % 4 < 2 ? 0.5 : 1.0, 1e-8));
    c.Expect(s.converged, "sinkhorn convergence " + std::to_string(t));
    const double ent = s.NormalizedV().SupNorm();
    c.Track("sinkhorn_ratio", ent / std::max(k2, 1e-300));
    c.Expect(ent <= k2 + kSinkhornBoundSlack, "sinkhorn " + std::to_string(t));
  }
  return c.Done();
}

DiscreteMeasure Inject(const DiscreteMeasure& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  std::normal_distribution<double> normal;
  std::vector<double> coords(m.coords().begin(), m.coords().end());
  std::vector<double> w(m.weights().begin(), m.weights().end());
  const size_t d = m.dim();
  const size_t dups = Between(rng, 1, m.size());
  for (size_t r = 0; r < dups; ++r) {
    const size_t i = Between(rng, 0, m.size() - 1);
    const double part = w[i] * unit(rng);
    w[i] -= part;
    auto x = m.point(i);
    coords.insert(coords.end(), x.begin(), x.end());
    w.push_back(part);
  }
  for (size_t z = Between(rng, 1, 3); z > 0; --z) {
    for (size_t k = 0; k < d; ++k) coords.push_back(normal(rng));
    w.push_back(0.0);
  }
  return DiscreteMeasure::FromFlatNoRescale(d, std::move(coords), std::move(w));
}

Outcome Invariance() {
  Check c;
  std::mt19937_64 rng(105);
  for (int t = 0; t < 50; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure mu = RandomMeasure(rng, Between(rng, 1, 10), d);
    DiscreteMeasure nu = RandomMeasure(rng, Between(rng, 1, 10), d);
    DiscreteMeasure injected = Inject(nu, rng);
    const double p = t % 2 ? 1.0 : 2.0;
    const std::vector<std::pair<std::string, DivergenceSpec>> specs = {
        {"wasserstein", DivergenceSpec::Wasserstein(p)},
        {"sinkhorn", DivergenceSpec::Sinkhorn(p, Entropic(0.5))},
        {"debiased", DivergenceSpec::DebiasedSinkhorn(p, Entropic(0.5))},
        {"sliced", DivergenceSpec::Sliced(p, DirectionSet::MonteCarlo(t, 64))},
        {"max_sliced",
         DivergenceSpec::MaxSliced(p, DirectionSet::MonteCarlo(t, 64))},
    };
    for (const auto& [name, spec] : specs) {
      const DivergenceValue a = EvaluateDivergence(mu, nu, spec);
      const DivergenceValue b = EvaluateDivergence(mu, injected, spec);
      const double diff = std::abs(a.value - b.value);
      const double tol = spec.kind() == DivergenceKind::kSliced
                             ? std::max(kInvarianceTol,
                                        kStdErrors * std::max(a.std_error,
                                                              b.std_error))
                             : kInvarianceTol;
      c.Track("max_diff", diff);
      c.Expect(diff <= tol, name + " instance " + std::to_string(t));
    }
  }
  return c.Done();
}

Outcome SinkhornContract() {
  Check c;
  std::mt19937_64 rng(106);
  const CostSpec p2 = CostSpec::Create(2.0);
  for (int t = 0; t < 50; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 30), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 30), d);
    const SinkhornSolution s =
        Sinkhorn(a, b, p2, Entropic(0.2 + 0.1 * (t % 8), 1e-7));
    c.Expect(s.converged, "convergence " + std::to_string(t));
    const double err = s.plan.L1MarginalError();
    c.Track("marginal_l1", err);
    c.Expect(err <= kMarginalTol, "marginals " + std::to_string(t));
  }
  const DiscreteMeasure d0 = DiscreteMeasure::UniformFlat(1, {0.0});
  const DiscreteMeasure d1 = DiscreteMeasure::UniformFlat(1, {1.0});
  for (double eps : {0.1, 0.5, 1.0}) {
    const double diff =
        std::abs(Sinkhorn(d0, d1, p2, Entropic(eps)).value - (1.0 - eps));
    c.Track("dirac_diff", diff);
    c.Expect(diff <= kDiracTol, "dirac pair eps " + std::to_string(eps));
  }
  for (int t = 0; t < 10; ++t) {
    const size_t d = Between(rng, 1, 2);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 2, 20), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 2, 20), d);
    const SinkhornSolution s = Sinkhorn(a, b, p2, Entropic(1e-3, 1e-7));
    c.Expect(s.converged, "small eps convergence " + std::to_string(t));
    const double diff = std::abs(s.value - SolveDiscreteOt(a, b, p2).value);
    c.Track("small_eps_diff", diff);
    c.Expect(diff <= kSmallEpsTol, "small eps " + std::to_string(t));
  }
  for (int t = 0; t < 20; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 15), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 15), d);
    const SinkhornConfig cfg = Entropic(0.5 + 0.25 * (t % 3), 1e-10);
    std::vector<size_t> order(a.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
    std::vector<double> coords;
    std::vector<double> weights;
    for (size_t i : order) {
      coords.insert(coords.end(), a.point(i).begin(), a.point(i).end());
      weights.push_back(a.weight(i));
    }
    const DiscreteMeasure reversed =
        DiscreteMeasure::FromFlatNoRescale(d, coords, weights);
    const double self =
        std::max(std::abs(DebiasedSinkhorn(a, a, p2, cfg)),
                 std::abs(DebiasedSinkhorn(a, reversed, p2, cfg)));
    c.Track("debiased_self", self);
    c.Expect(self <= kDebiasedZeroTol, "debiased self " + std::to_string(t));
    const double asym = std::abs(DebiasedSinkhorn(a, b, p2, cfg) -
                                 DebiasedSinkhorn(b, a, p2, cfg));
    c.Track("debiased_asymmetry", asym);
    c.Expect(asym <= kSymmetryTol, "debiased symmetry " + std::to_string(t));
  }
  return c.Done();
}

double MaxSlicedGrid(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const CostSpec& cost, size_t angles) {
  double best = 0.0;
  for (size_t i = 0; i < angles; ++i) {
    const double phi = std::numbers::pi * static_cast<double>(i) / angles;
    const std::vector<double> theta = {std::cos(phi), std::sin(phi)};
    best = std::max(best, ProjectedW(a, b, cost, theta));
  }
  return best;
}

Outcome SlicedSandwich() {
  Check c;
  std::mt19937_64 rng(107);
  for (int t = 0; t < 100; ++t) {
    const size_t d = Between(rng, 2, 4);
    DiscreteMeasure a = RandomMeasure(rng, Between(rng, 1, 15), d);
    DiscreteMeasure b = RandomMeasure(rng, Between(rng, 1, 15), d);
    const CostSpec cost = CostSpec::Create(t % 2 ? 1.0 : 2.0);
    const SlicedResult sw =
        SlicedW(a, b, cost, DirectionSet::MonteCarlo(1000 + t, 256));
    const double w = SolveDiscreteOt(a, b, cost).value;
    MaxSlicedOptions opt;
    opt.seed = t;
    const double msw = MaxSlicedW(a, b, cost, opt).value;
    c.Track("sw_over_w", (sw.value - w) / std::max(sw.std_error, 1e-300));
    c.Expect(sw.value <= w + kStdErrors * sw.std_error,
             "sw <= w " + std::to_string(t));
    c.Expect(msw >= sw.value - kStdErrors * sw.std_error,
             "max-sw >= sw " + std::to_string(t));
  }
  const DiscreteMeasure a = DiscreteMeasure::UniformFlat(2, {0.0, 0.0});
  const DiscreteMeasure b = DiscreteMeasure::UniformFlat(2, {0.6, 0.8});
  const CostSpec p2 = CostSpec::Create(2.0);
  const SlicedResult sw = SlicedW(a, b, p2, DirectionSet::MonteCarlo(7, 1024));
  c.Track("dirac_sw_z", std::abs(sw.value - 0.5) / sw.std_error);
  c.Expect(std::abs(sw.value - 0.5) <= kStdErrors * sw.std_error,
           "dirac sliced");
  const double msw = MaxSlicedW(a, b, p2).value;
  const double grid = MaxSlicedGrid(a, b, p2, 10000);
  c.Track("dirac_max_sliced_diff", std::abs(msw - 1.0));
  c.Expect(std::abs(msw - 1.0) <= kMaxSlicedGridTol, "dirac max-sliced");
  c.Expect(std::abs(grid - 1.0) <= kMaxSlicedGridTol, "dirac grid oracle");
  return c.Done();
}

Outcome KMeansEquivalence() {
  Check c;
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> unit(1e-3, 1.0);
  const CostSpec p2 = CostSpec::Create(2.0);
  for (int t = 0; t < 50; ++t) {
    const size_t d = Between(rng, 1, 3);
    DiscreteMeasure samples = RandomMeasure(rng, Between(rng, 5, 60), d);
    samples = DiscreteMeasure::UniformFlat(
        d, std::vector<double>(samples.coords().begin(),
                               samples.coords().end()));
    const DiscreteMeasure y = RandomMeasure(rng, Between(rng, 1, 8), d);
    const std::vector<Point> centroids = y.points();
    const std::vector<double> coords(y.coords().begin(), y.coords().end());
    const double q = QuantizationCost(samples, centroids);
    const std::vector<double> pi = VoronoiWeights(centroids, samples);
    const double w =
        SolveDiscreteOt(samples,
                        DiscreteMeasure::FromFlatNoRescale(d, coords, pi), p2)
            .value;
    c.Track("voronoi_diff", std::abs(w - q));
    c.Expect(std::abs(w - q) <= kQuantizationTol,
             "voronoi cost " + std::to_string(t));
    for (int s = 0; s < 20; ++s) {
      std::vector<double> other(pi.size());
      double total = 0.0;
      for (double& x : other) total += (x = unit(rng));
      for (double& x : other) x /= total;
      const double v =
          SolveDiscreteOt(samples, DiscreteMeasure::FromFlat(d, coords, other),
                          p2)
              .value;
      c.Expect(v >= q - kQuantizationTol, "lower bound " + std::to_string(t));
    }
  }
  const KMeansResult r = LloydBestOf(
      DiscreteMeasure::UniformFlat(1, {0.0, 1.0, 2.0, 3.0}), 2, 1, 10);
  c.Track("lloyd_diff", std::abs(r.cost - 0.25));
  c.Expect(std::abs(r.cost - 0.25) <= kLloydTol, "lloyd four points");
  return c.Done();
}

Outcome RateCriterion(const std::string& config_dir, ExperimentAxis axis) {
  const bool samples = axis == ExperimentAxis::kSamples;
  const std::string path =
      config_dir + (samples ? "/rate_n.json" : "/rate_N.json");
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = ExperimentConfig::FromFile(path);
  cfg.Validate(axis);
  const std::vector<ExperimentRecord> records = RunExperiment(cfg, axis);
  const double s = Seconds(start);
  Check c;
  const SlopeReport slope = EstimateSlope(records);
  const double lo = samples ? kRateNLo : kRateSupportLo;
  const double hi = samples ? kRateNHi : kRateSupportHi;
  c.Track("slope", slope.slope);
  c.Track("slope_ci95", slope.slope_half_width);
  c.Track("seconds", s);
  c.Expect(slope.slope >= lo && slope.slope <= hi, "slope outside window");
  c.Expect(s <= (samples ? kRateNSeconds : kRateSupportSeconds), "runtime");
  return c.Done();
}

struct CommandOutput {
  int code = -1;
  std::string out;
};

CommandOutput Shell(const std::string& cmd) {
  CommandOutput r;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void Determinism(Check& c, const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "otbary_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 rng(110);
  std::vector<std::string> files;
  for (int i = 0; i < 3; ++i) {
    const DiscreteMeasure m = RandomMeasure(rng, 40, 2);
    std::ofstream out(dir / ("m" + std::to_string(i) + ".csv"));
    out.precision(17);
    for (size_t k = 0; k < m.size(); ++k) {
      out << m.point(k)[0] << "," << m.point(k)[1] << "\n";
    }
    files.push_back((dir / ("m" + std::to_string(i) + ".csv")).string());
  }
  std::ofstream(dir / "rates.json")
      << R"({"d": 1, "L": 2, "N": 2, "n_grid": [20, 40, 80],
             "replications": 2, "n_ref": 800, "restarts": 1,
             "reference_restarts": 1, "reference_polish_outer": 3,
             "solver": {"max_outer": 20}, "seed": 3})";
  const std::string targets = files[0] + " " + files[1] + " " + files[2];
  const std::vector<std::string> commands = {
      "divergence " + files[0] + " " + files[1],
      "divergence --kind sinkhorn --eps 0.3 " + files[0] + " " + files[1],
      "divergence --kind sw --seed 9 " + files[0] + " " + files[1],
      "divergence --kind maxsw " + files[0] + " " + files[1],
      "barycenter --constraint sparse:5 --seed 4 " + targets,
      "barycenter --constraint sparse:4 --kind sinkhorn --eps 0.5 --seed 4 " +
          targets,
      "kmeans --n 6 --seed 2 --restarts 3 " + files[0],
      "rates --omit-timing --axis n --config " + (dir / "rates.json").string() +
          " --out " + (dir / "r").string(),
  };
  for (const std::string& args : commands) {
    const CommandOutput a = Shell(cli + " " + args);
    const std::string csv_a = Slurp(dir / "r" / "results.csv");
    const CommandOutput b = Shell(cli + " " + args);
    const std::string csv_b = Slurp(dir / "r" / "results.csv");
    c.Expect(a.code == 0 && b.code == 0, "exit status of '" + args + "'");
    c.Expect(a.out == b.out && csv_a == csv_b && !a.out.empty(),
             "output of '" + args + "'");
  }
  fs::remove_all(dir);
}

Outcome DescentAndDeterminism(const std::string& cli) {
  Check c;
  std::mt19937_64 rng(111);
  const DivergenceSpec spec = DivergenceSpec::Wasserstein(2.0);
  for (int t = 0; t < 10; ++t) {
    const size_t d = Between(rng, 1, 3);
    std::vector<DiscreteMeasure> targets;
    for (size_t l = Between(rng, 1, 4); l > 0; --l) {
      targets.push_back(RandomMeasure(rng, Between(rng, 10, 80), d));
    }
    const size_t n = Between(rng, 1, 8);
    std::vector<BarycenterSolution> runs;
    runs.push_back(SolveBarycenter(targets, SparseConstraint{n}, spec, t));
    std::vector<double> w(n, 1.0 / n);
    runs.push_back(
        SolveBarycenter(targets, FreeSupportConstraint{w}, spec, t));
    for (const auto& sol : runs) {
      for (size_t i = 1; i < sol.cost_trace.size(); ++i) {
        const double rise = sol.cost_trace[i] - sol.cost_trace[i - 1];
        c.Track("max_rise", rise);
        c.Expect(rise <= kDescentTol, "trace " + std::to_string(t));
      }
    }
    const BarycenterSolution again =
        SolveBarycenter(targets, SparseConstraint{n}, spec, t);
    c.Expect(BarycenterToJson(again) == BarycenterToJson(runs[0]),
             "library determinism " + std::to_string(t));
  }
  if (cli.empty()) {
    c.Expect(false, "command-line tool not available");
  } else {
    Determinism(c, cli);
  }
  return c.Done();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for otbary"};
  std::vector<int> only;
  std::string config_dir = OTBARY_CONFIG_DIR;
#ifdef OTBARY_CLI_PATH
  std::string cli = OTBARY_CLI_PATH;
#else
  std::string cli;
#endif
  app.add_option("--only", only, "Criteria to run (comma separated)")
      ->delimiter(',')
      ->check(CLI::Range(1, 11));
  app.add_option("--config-dir", config_dir, "Directory with rate configs")
      ->capture_default_str();
  app.add_option("--cli", cli, "Path of the otbary executable")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {
          {"exact OT matches brute force", ExactOracle},
          {"1-D closed form matches exact OT", OneDimensional},
          {"strong and weak duality", Duality},
          {"dual potential bounds", DualBounds},
          {"canonicalization invariance", Invariance},
          {"Sinkhorn contract", SinkhornContract},
          {"sliced sandwich", SlicedSandwich},
          {"k-means equivalence", KMeansEquivalence},
          {"rate in n",
           [&] { return RateCriterion(config_dir, ExperimentAxis::kSamples); }},
          {"trend in N",
           [&] { return RateCriterion(config_dir, ExperimentAxis::kSupport); }},
          {"descent and determinism", [&] { return DescentAndDeterminism(cli); }},
      };
  const std::set<int> selected(only.begin(), only.end());
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL")
              << "  " << criteria[i].first << "  [" << o.detail << "]"
              << std::endl;
  }
  return all ? 0 : 1;
}
