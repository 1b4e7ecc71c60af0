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

#include <cmath>
#include <vector>

#include "tlns/fitting.hpp"
#include "tlns/generator.hpp"
#include "tlns/model.hpp"

namespace {

void BM_FitWindowScaling(benchmark::State& state) {
  std::vector<tlns::ScalingSample> s;
  for (int e = 10; e <= 27; ++e) {
    const tlns::Count nv = tlns::Count{1} << e;
    s.push_back({nv, 2 * std::pow(static_cast<double>(nv), 0.5)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(tlns::fit_window_scaling(s).gamma);
}
BENCHMARK(BM_FitWindowScaling);

void BM_FitZipfMandelbrot(benchmark::State& state) {
  tlns::ZipfMandelbrotSampler sampler(1.0, 2.0, 10'000);
  tlns::Engine eng(1);
  std::vector<tlns::Count> draws(static_cast<std::size_t>(state.range(0)));
  for (auto& d : draws) d = sampler.sample(eng);
  const auto h = tlns::histogram(draws);
  for (auto _ : state) benchmark::DoNotOptimize(tlns::fit_zipf_mandelbrot(h).lambda);
}
BENCHMARK(BM_FitZipfMandelbrot)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_FitModifiedCauchy(benchmark::State& state) {
  tlns::CorrelationCurve c;
  for (int t = 0; t <= 32; ++t) {
    c.points.push_back({static_cast<double>(t), tlns::revisit_probability(0.8, 10.0, t), 1000, 1});
  }
  for (auto _ : state) benchmark::DoNotOptimize(tlns::fit_modified_cauchy(c).alpha);
}
BENCHMARK(BM_FitModifiedCauchy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
