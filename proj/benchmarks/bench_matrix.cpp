// Copyright 2026 The tlns Authors
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

#include <benchmark/benchmark.h>

#include <vector>

#include "tlns/anonymize.hpp"
#include "tlns/generator.hpp"
#include "tlns/traffic_matrix.hpp"

namespace {

tlns::Window window_of(tlns::Count n_valid) {
  tlns::SyntheticScenario s;
  s.n_valid = n_valid;
  s.n_windows = 1;
  s.n_sources = 4 * n_valid;
  tlns::StreamGenerator gen(s);
  return *gen.next();
}

void BM_BuildMatrix(benchmark::State& state) {
  const auto w = window_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tlns::build_matrix(w).nnz());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMatrix)->RangeMultiplier(8)->Range(1 << 11, 1 << 20);

void BM_Aggregates(benchmark::State& state) {
  const auto m = tlns::build_matrix(window_of(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tlns::aggregates(m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Aggregates)->Arg(1 << 17)->Arg(1 << 20);

void BM_DegreeVectors(benchmark::State& state) {
  const auto m = tlns::build_matrix(window_of(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tlns::degree_vectors(m).source_packets.size());
}
BENCHMARK(BM_DegreeVectors)->Arg(1 << 17);

void BM_Anonymize(benchmark::State& state) {
  const auto m = tlns::build_matrix(window_of(1 << 17));
  tlns::AnonymizationKey key{};
  key[0] = 1;
  const tlns::Anonymizer anon(key);
  for (auto _ : state) benchmark::DoNotOptimize(tlns::anonymize(m, anon).nnz());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.nnz()));
}
BENCHMARK(BM_Anonymize);

}  // namespace

BENCHMARK_MAIN();
