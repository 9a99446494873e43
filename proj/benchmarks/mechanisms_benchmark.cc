// Copyright 2026 The ldpmd Authors
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


#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>
#include "ldpmd/audit.h"
#include "ldpmd/estimation.h"
#include "ldpmd/harness.h"
#include "ldpmd/mechanisms.h"
#include "ldpmd/privkvm.h"
#include "ldpmd/random.h"

namespace ldpmd {
namespace {

const PrivacyBudget& Eps1() {
  static const PrivacyBudget* budget =
      new PrivacyBudget(*PrivacyBudget::Create(1.0));
  return *budget;
}

void BM_RandomStreamNextU64(benchmark::State& state) {
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.NextU64());
}
BENCHMARK(BM_RandomStreamNextU64);

void BM_HarmonyPerturb(benchmark::State& state) {
  RandomStream rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(HarmonyPerturb(0.3, Eps1(), rng));
  }
}
BENCHMARK(BM_HarmonyPerturb);

void BM_PiecewisePerturb(benchmark::State& state) {
  RandomStream rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(PiecewisePerturb(0.3, Eps1(), rng));
  }
}
BENCHMARK(BM_PiecewisePerturb);

void BM_BiSamplePerturb(benchmark::State& state) {
  RandomStream rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BiSamplePerturb(0.3, Eps1(), rng));
  }
}
BENCHMARK(BM_BiSamplePerturb);

void BM_BiSampleMdPerturbNull(benchmark::State& state) {
  RandomStream rng(5);
  const PreparedValue null = PreparedValue::Null();
  for (auto _ : state) {
    benchmark::DoNotOptimize(BiSampleMdPerturb(null, Eps1(), rng));
  }
}
BENCHMARK(BM_BiSampleMdPerturbNull);

void BM_PrivKvmPerturb(benchmark::State& state) {
  RandomStream rng(6);
  const PrivKvmConfig config = *PrivKvmConfig::Create(Eps1());
  const KvPair pair{true, 0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(PrivKvmPerturb(pair, config, rng));
  }
}
BENCHMARK(BM_PrivKvmPerturb);

// Perturb-and-count throughput over a batch of users.
void BM_BiSampleAggregate(benchmark::State& state) {
  const int64_t n = state.range(0);
  RandomStream gen(7);
  std::vector<double> values(n);
  for (double& v : values) v = gen.Uniform(-1.0, 1.0);
  for (auto _ : state) {
    RandomStream rng = gen.Fork(state.iterations());
    DirectionCounts counts;
    for (double v : values) counts.Add(*BiSamplePerturb(v, Eps1(), rng));
    benchmark::DoNotOptimize(MeanEstimateMd(counts, Eps1()));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BiSampleAggregate)->Arg(10000)->Arg(100000);

void BM_AuditBiSampleMd(benchmark::State& state) {
  const std::vector<PreparedValue> grid =
      DefaultAuditGrid(Mechanism::kBiSampleMd, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    absl::StatusOr<ChannelMatrix> m =
        ComputeChannelMatrix(Mechanism::kBiSampleMd, Eps1(), grid);
    benchmark::DoNotOptimize(AuditEpsilon(*m));
  }
}
BENCHMARK(BM_AuditBiSampleMd)->Arg(201)->Arg(2001);

void BM_RunTrial(benchmark::State& state) {
  ExperimentConfig config;
  config.epsilons = {1.0};
  config.sizes = {static_cast<uint64_t>(state.range(0))};
  config.mechanisms = {Mechanism::kBiSampleMd};
  config.behaviors = {BehaviorMode::kNullValue};
  config.seed = 8;
  const SweepPoint point{1.0, config.sizes[0], 0.3};
  int trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunTrial(
        config, {Mechanism::kBiSampleMd, BehaviorMode::kNullValue}, point,
        trial++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrial)->Arg(100000);

}  // namespace
}  // namespace ldpmd

BENCHMARK_MAIN();
