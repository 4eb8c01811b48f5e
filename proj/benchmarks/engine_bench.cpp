// Copyright 2026 The kiss-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "kiss/partitioning.hpp"
#include "kiss/policies.hpp"
#include "kiss/trace.hpp"

namespace {

const std::vector<kiss::Invocation>& trace() {
  static const auto events = kiss::synthesize_edge_trace(kiss::SynthesisConfig{});
  return events;
}

void BM_Synthesize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kiss::synthesize_edge_trace(kiss::SynthesisConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace().size()));
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

// Arg: memory in GB.
void BM_Baseline(benchmark::State& state) {
  const auto policy = static_cast<kiss::PolicyKind>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kiss::run_baseline(trace(), {static_cast<double>(state.range(0)) * kiss::kMbPerGb, policy}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace().size()));
}
BENCHMARK(BM_Baseline)->ArgsProduct({{2, 8, 24}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

void BM_Kiss(benchmark::State& state) {
  kiss::KissConfig k;
  k.total_memory_mb = static_cast<double>(state.range(0)) * kiss::kMbPerGb;
  for (auto _ : state) benchmark::DoNotOptimize(kiss::route_and_run(trace(), k));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace().size()));
}
BENCHMARK(BM_Kiss)->Arg(2)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_PureCachingLru(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(kiss::run_pure_caching(trace(), static_cast<double>(state.range(0)), kiss::PolicyKind::Lru));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace().size()));
}
BENCHMARK(BM_PureCachingLru)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
