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

#include <sstream>
#include <string>

#include "tlns/generator.hpp"
#include "tlns/ingest.hpp"

namespace {

std::string capture(tlns::RecordFormat format, tlns::Count packets) {
  tlns::SyntheticScenario s;
  s.n_valid = packets;
  s.n_windows = 1;
  s.n_sources = 4 * packets;
  std::ostringstream out;
  tlns::RecordWriter w(out, format, format == tlns::RecordFormat::kCsv);
  tlns::StreamGenerator gen(s);
  while (auto win = gen.next()) w.write(win->records);
  w.flush();
  return out.str();
}

void BM_ParseCsv(benchmark::State& state) {
  const auto text = capture(tlns::RecordFormat::kCsv, state.range(0));
  for (auto _ : state) {
    std::istringstream in(text);
    tlns::RecordReader reader(tlns::stream_source(in), tlns::RecordFormat::kCsv);
    tlns::PacketRecord r;
    std::uint64_t n = 0;
    while (reader.next(r)) ++n;
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseCsv)->Arg(1 << 16)->Arg(1 << 20);

void BM_ParseBinary(benchmark::State& state) {
  const auto bytes = capture(tlns::RecordFormat::kBinary, state.range(0));
  for (auto _ : state) {
    std::istringstream in(bytes);
    tlns::RecordReader reader(tlns::stream_source(in), tlns::RecordFormat::kBinary);
    benchmark::DoNotOptimize(tlns::read_all(reader).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParseBinary)->Arg(1 << 20);

void BM_WindowStream(benchmark::State& state) {
  const auto text = capture(tlns::RecordFormat::kCsv, 1 << 20);
  const auto filter = tlns::PacketFilter::parse("src=0-4294967295");
  for (auto _ : state) {
    std::istringstream in(text);
    tlns::RecordReader reader(tlns::stream_source(in), tlns::RecordFormat::kCsv);
    tlns::WindowStream stream(reader, filter, {static_cast<tlns::Count>(state.range(0))});
    std::uint64_t windows = 0;
    while (stream.next()) ++windows;
    benchmark::DoNotOptimize(windows);
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_WindowStream)->Arg(1 << 14)->Arg(1 << 17);

}  // namespace

BENCHMARK_MAIN();
