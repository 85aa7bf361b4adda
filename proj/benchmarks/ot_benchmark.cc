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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "otbary/barycenter.h"
#include "otbary/divergence.h"
#include "otbary/kmeans.h"
#include "otbary/measure.h"
#include "otbary/ot_1d.h"
#include "otbary/ot_exact.h"
#include "otbary/ot_sinkhorn.h"
#include "otbary/ot_sliced.h"

namespace {

using namespace otbary;

DiscreteMeasure Cloud(size_t n, size_t d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> coords(n * d);
  for (double& x : coords) x = normal(rng);
  return DiscreteMeasure::UniformFlat(d, std::move(coords));
}

const CostSpec kP2 = CostSpec::Create(2.0);

void BM_NetworkSimplex(benchmark::State& state) {
  const size_t n = state.range(0);
  const DiscreteMeasure a = Cloud(n, 2, 1);
  const DiscreteMeasure b = Cloud(n, 2, 2);
  ExactOtOptions opt;
  opt.method = ExactMethod::kNetworkSimplex;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveDiscreteOt(a, b, kP2, opt).value);
  }
}
BENCHMARK(BM_NetworkSimplex)->Arg(50)->Arg(200)->Arg(500)
    ->Unit(benchmark::kMillisecond);

void BM_SemiDiscrete(benchmark::State& state) {
  const DiscreteMeasure a = Cloud(state.range(0), 2, 3);
  const DiscreteMeasure b = Cloud(state.range(1), 2, 4);
  ExactOtOptions opt;
  opt.method = state.range(2) ? ExactMethod::kCellExchange
                              : ExactMethod::kNetworkSimplex;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveDiscreteOt(a, b, kP2, opt).value);
  }
}
BENCHMARK(BM_SemiDiscrete)
    ->Args({5000, 10, 0})
    ->Args({5000, 10, 1})
    ->Args({20000, 10, 1})
    ->Unit(benchmark::kMillisecond);

void BM_W1d(benchmark::State& state) {
  const DiscreteMeasure a = Cloud(state.range(0), 1, 5);
  const DiscreteMeasure b = Cloud(state.range(0), 1, 6);
  for (auto _ : state) benchmark::DoNotOptimize(W1d(a, b, kP2));
}
BENCHMARK(BM_W1d)->Arg(1000)->Arg(100000);

void BM_Sinkhorn(benchmark::State& state) {
  const DiscreteMeasure a = Cloud(state.range(0), 2, 7);
  const DiscreteMeasure b = Cloud(state.range(0), 2, 8);
  SinkhornConfig cfg;
  cfg.epsilon = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Sinkhorn(a, b, kP2, cfg).value);
  }
}
BENCHMARK(BM_Sinkhorn)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Sliced(benchmark::State& state) {
  const DiscreteMeasure a = Cloud(state.range(0), 5, 9);
  const DiscreteMeasure b = Cloud(state.range(0), 5, 10);
  const DirectionSet dirs = DirectionSet::MonteCarlo(1, 256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SlicedW(a, b, kP2, dirs).value);
  }
}
BENCHMARK(BM_Sliced)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Lloyd(benchmark::State& state) {
  const DiscreteMeasure a = Cloud(state.range(0), 2, 11);
  for (auto _ : state) benchmark::DoNotOptimize(Lloyd(a, 10, 1).cost);
}
BENCHMARK(BM_Lloyd)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SparseBarycenter(benchmark::State& state) {
  std::vector<DiscreteMeasure> targets;
  for (uint64_t l = 0; l < 3; ++l) {
    targets.push_back(Cloud(state.range(0), 2, 20 + l));
  }
  const DivergenceSpec spec = DivergenceSpec::Wasserstein(2.0);
  BarycenterOptions opt;
  opt.restarts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        SolveBarycenter(targets, SparseConstraint{10}, spec, 1, opt).cost);
  }
}
BENCHMARK(BM_SparseBarycenter)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
