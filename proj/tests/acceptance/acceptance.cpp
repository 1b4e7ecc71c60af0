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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "test_support.hpp"
#include "tlns/anonymize.hpp"
#include "tlns/fitting.hpp"
#include "tlns/generator.hpp"
#include "tlns/ingest.hpp"
#include "tlns/model.hpp"
#include "tlns/serialization.hpp"
#include "tlns/site_model.hpp"
#include "tlns/statistics.hpp"
#include "tlns/traffic_matrix.hpp"

namespace {

using namespace tlns;
using testing::DenseOracle;
using testing::Rng;
using testing::TempDir;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// --- 1 ---------------------------------------------------------------------

Outcome sum_identity() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Count nv = Count{1} << rng.between(10, 17);
    auto records = (i % 2) ? rng.skewed_records(nv, rng.between(16, 1 << 16))
                           : rng.records(nv, rng.between(1, 1 << 12));
    const auto m = build_matrix(records, {static_cast<std::uint64_t>(i), 0, 0, nv});
    Count total = 0;
    for (const auto& e : m.entries()) total += e.count;
    bad += total != nv || m.n_valid() != nv;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 30.0,
          "1000 windows, " + std::to_string(bad) + " mismatches, " + fmt(secs) + " s (limit 30)"};
}

// --- 2 ---------------------------------------------------------------------

Outcome permutation_invariance() {
  Rng rng(2002);
  std::size_t bad = 0;
  for (int i = 0; i < 100; ++i) {
    auto m = build_matrix(rng.skewed_records(rng.between(1, 20'000), rng.between(2, 3000)), {});
    AnonymizationKey key{};
    for (auto& b : key) b = static_cast<std::uint8_t>(rng.below(256));
    const auto out = anonymize(m, key);
    const auto before = degree_vectors(m);
    const auto after = degree_vectors(out);
    using testing::sorted_values;
    const bool same =
        aggregates(out) == aggregates(m) &&
        sorted_values(after.source_packets) == sorted_values(before.source_packets) &&
        sorted_values(after.source_fanout) == sorted_values(before.source_fanout) &&
        sorted_values(after.dest_packets) == sorted_values(before.dest_packets) &&
        sorted_values(after.dest_fanin) == sorted_values(before.dest_fanin) &&
        sorted_values(after.link_packets) == sorted_values(before.link_packets);
    bad += !same;
  }
  return {bad == 0, "100 (matrix, key) pairs, " + std::to_string(bad) + " differ"};
}

// --- 3 ---------------------------------------------------------------------

Outcome subrange_partition() {
  Rng rng(3003);
  std::size_t bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto m = build_matrix(rng.skewed_records(rng.between(1, 10'000), 500), {});
    const auto mask = rng.mask_from(m, rng.unit());
    const auto inc = subrange_include(m, mask);
    const auto exc = subrange_exclude(m, mask);
    std::vector<MatrixEntry> joined(inc.entries().begin(), inc.entries().end());
    joined.insert(joined.end(), exc.entries().begin(), exc.entries().end());
    std::sort(joined.begin(), joined.end(),
              [](const MatrixEntry& a, const MatrixEntry& b) { return a.link() < b.link(); });
    const bool disjoint =
        std::adjacent_find(joined.begin(), joined.end(), [](const auto& a, const auto& b) {
          return a.link() == b.link();
        }) == joined.end();
    const bool equal =
        std::equal(joined.begin(), joined.end(), m.entries().begin(), m.entries().end());
    bad += !(disjoint && equal);
  }
  return {bad == 0, "100 (matrix, mask) pairs, " + std::to_string(bad) + " fail to reassemble"};
}

// --- 4 ---------------------------------------------------------------------

Outcome dense_oracle() {
  Rng rng(4004);
  std::size_t bad = 0;
  for (int i = 0; i < 50; ++i) {
    auto records = (i % 2) ? rng.records(rng.between(1, 30'000), 512)
                           : rng.skewed_records(rng.between(1, 30'000), 512);
    bad += aggregates(build_matrix(records, {})) != DenseOracle(records).aggregates();
  }
  return {bad == 0, "50 windows over 512x512, " + std::to_string(bad) + " mismatches"};
}

// --- 5 ---------------------------------------------------------------------

Outcome scaling_constants() {
  struct Case {
    double c;
    double gamma;
  };
  double worst = 0;
  for (const Case k : {Case{5, 0.2}, Case{2, 0.5}, Case{0.03, 1.0}}) {
    std::vector<ScalingSample> s;
    for (int e = 17; e <= 27; ++e) {
      const Count nv = Count{1} << e;
      s.push_back({nv, k.c * std::pow(static_cast<double>(nv), k.gamma)});
    }
    const auto f = fit_window_scaling(s);
    worst = std::max({worst, std::abs(f.gamma - k.gamma) / k.gamma,
                      std::abs(f.coefficient - k.c) / k.c});
  }
  return {worst <= 1e-6, "worst relative error " + fmt(worst) + " (limit 1e-6)"};
}

// --- 6 ---------------------------------------------------------------------

Outcome zipf_round_trip() {
  const auto t0 = Clock::now();
  ZipfMandelbrotSampler sampler(1.0, 2.0, 10'000);
  Engine eng(6006);
  std::vector<Count> draws(1'000'000);
  for (auto& d : draws) d = sampler.sample(eng);
  const auto f = fit_zipf_mandelbrot(histogram(draws));
  const bool round_trip = std::abs(f.lambda - 2.0) <= 0.1 && std::abs(f.delta - 1.0) <= 0.3;

  SyntheticScenario s;
  s.n_valid = 1 << 17;
  s.n_windows = 16;
  s.seed = 6;
  std::vector<WindowAnalysis> windows;
  StreamGenerator gen(s);
  while (auto w = gen.next()) windows.push_back(analyze_window(*w));
  const auto p = fit_site_model(windows);
  const bool regime = p.delta >= -1 && p.delta <= 3 && p.lambda >= 1 && p.lambda <= 3;
  const double secs = seconds_since(t0);
  return {round_trip && regime && secs < 60.0,
          "lambda " + fmt(f.lambda) + ", delta " + fmt(f.delta) + "; synthetic traffic delta " +
              fmt(p.delta) + ", lambda " + fmt(p.lambda) + "; " + fmt(secs) + " s"};
}

// --- 7 ---------------------------------------------------------------------

Outcome cauchy_round_trip() {
  const auto t0 = Clock::now();
  const double alpha = 0.8;
  const double beta = 10.0;
  const double reference = std::pow(beta, 1.0 / alpha);

  const auto sets = simulate_presence(alpha, beta, 100'000, 64, 7007);
  const auto noisy = fit_modified_cauchy(self_correlation(sets, 32));
  const double rel = std::abs(noisy.t_half() - reference) / reference;

  CorrelationCurve exact;
  for (int t = 0; t <= 32; ++t) {
    exact.points.push_back({static_cast<double>(t), revisit_probability(alpha, beta, t), 1000, 1});
  }
  const auto clean = fit_modified_cauchy(exact);
  const double err = std::max(std::abs(clean.alpha - alpha), std::abs(clean.beta - beta));
  const double secs = seconds_since(t0);
  return {rel <= 0.2 && err <= 1e-4 && secs < 120.0,
          "t_half " + fmt(noisy.t_half()) + " vs " + fmt(reference) + " (" + fmt(100 * rel) +
              "%); exact-curve error " + fmt(err) + "; " + fmt(secs) + " s"};
}

// --- 8 ---------------------------------------------------------------------

Outcome cross_correlation_closure() {
  SyntheticScenario s;
  s.n_valid = 1 << 20;
  s.n_windows = 4;
  s.n_sources = 4'000'000;
  s.seed = 8008;
  s.observer_b_rule = ObserverRule::kModelVisibility;
  const auto st = generate_two_observers(s);

  std::vector<ObservedWindow> a;
  std::vector<SeenWindow> b;
  std::size_t j = 0;
  for (const auto& w : window_stream(st.a, {s.n_valid})) {
    a.push_back({w.index, degree_vectors(build_matrix(w)).source_packets});
    SeenWindow seen{w.index, {}};
    for (; j < st.b.size() && st.b[j].timestamp <= w.end; ++j) {
      if (st.b[j].timestamp >= w.start) seen.sources.push_back(st.b[j].src);
    }
    std::sort(seen.sources.begin(), seen.sources.end());
    b.push_back(std::move(seen));
  }
  const auto x = cross_correlation(a, b, s.n_valid);

  std::size_t outside = 0;
  for (const auto& bucket : x.buckets) {
    if (std::abs(bucket.probability - bucket.model) > 3 * bucket.model_sigma() + 1e-12) ++outside;
  }
  const bool analytic = second_observer_probability(1 << 10, 1 << 20) == 1.0 &&
                        second_observer_probability(2, Count{1} << 30) == 1.0 / 15.0;
  return {outside == 0 && analytic && !x.buckets.empty(),
          std::to_string(x.buckets.size()) + " buckets, " + std::to_string(outside) +
              " outside 3 sigma; analytic points " + (analytic ? "exact" : "wrong")};
}

// --- 9 ---------------------------------------------------------------------

Outcome model_predicates() {
  Rng rng(9009);
  double worst_half = 0;
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    CauchyFit c;
    c.alpha = 1e-3 + (CauchyFit::kAlphaMax - 1e-3) * rng.unit();
    c.beta = std::exp(std::log(1e-6) + (std::log(1e6) - std::log(1e-6)) * rng.unit());
    // t_half must itself be representable for the identity to be testable.
    if (!std::isnormal(c.t_half())) continue;
    ++tested;
    worst_half = std::max(worst_half, std::abs(revisit_probability(c, c.t_half()) - 0.5));
  }

  ModelParameters p;
  p.gamma = 0.5;
  p.delta = 1;
  p.lambda = 2;
  p.alpha = 0.8;
  p.beta = 10;
  bool monotone = true;
  double prev = INFINITY;
  for (int t = 0; t < 1000; ++t) {
    const double v = observability_score(p, {1 << 20, 64, static_cast<double>(t)}).raw;
    monotone = monotone && v <= prev;
    prev = v;
  }

  std::size_t order_bad = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Count nv = Count{1} << rng.between(4, 40);
    const ObservabilityQuery qa{nv, rng.between(1, 1 << 20), 100 * rng.unit()};
    const ObservabilityQuery qb{nv, rng.between(1, 1 << 20), 100 * rng.unit()};
    const auto sa = observability_score(p, qa);
    const auto sb = observability_score(p, qb);
    const auto sign = [](double x, double y) { return (x > y) - (x < y); };
    // Uncapped normalized values must order exactly like raw scores; capping
    // may only merge neighbours at 1, never reverse them.
    const bool strict = sign(sa.normalized, sb.normalized) == sign(sa.raw, sb.raw);
    const bool capped = sign(sa.probability, sb.probability) * sign(sa.raw, sb.raw) >= 0 &&
                        (sa.raw != sb.raw || sa.probability == sb.probability);
    order_bad += !(strict && capped);
  }
  return {worst_half <= 1e-12 && monotone && order_bad == 0,
          "max |C(t_half) - 1/2| " + fmt(worst_half) + " over " + std::to_string(tested) +
              " fits; t sweep " +
              (monotone ? "non-increasing" : "NOT monotone") + "; " + std::to_string(order_bad) +
              " of 10000 pairs misordered"};
}

// --- 10 --------------------------------------------------------------------

Outcome throughput() {
  TempDir dir;
  const auto path = dir / "throughput.csv";
  constexpr Count kPackets = Count{1} << 24;
  {
    std::ofstream out(path, std::ios::binary);
    RecordWriter writer(out, RecordFormat::kCsv, true);
    Rng rng(10'010);
    std::vector<PacketRecord> chunk;
    Timestamp t = 1'700'000'000'000'000ULL;
    for (Count done = 0; done < kPackets; done += chunk.size()) {
      chunk.clear();
      for (int k = 0; k < (1 << 16); ++k) {
        const double u = rng.unit();
        chunk.push_back({t++, static_cast<Address>(4'000'000'000.0 * u * u * u),
                         static_cast<Address>(rng.below(1 << 20))});
      }
      writer.write(chunk);
    }
  }

  const auto t0 = Clock::now();
  auto reader = RecordReader::open(path);
  WindowStream stream(reader, PacketFilter{}, {Count{1} << 17});
  Count packets = 0;
  Count checksum = 0;
  while (auto w = stream.next()) {
    const auto agg = aggregates(build_matrix(*w));
    packets += agg.valid_packets;
    checksum += agg.unique_sources;
  }
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(packets) / secs;
  return {packets == kPackets && rate >= 1e6,
          fmt(rate / 1e6) + " M packets/s over " + std::to_string(packets) + " packets (" +
              fmt(secs) + " s, floor 1 M/s; checksum " + std::to_string(checksum) + ")"};
}

// --- 11 --------------------------------------------------------------------

int cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int rc = cli::run(args, out, err);
  if (rc != 0) std::cerr << err.str();
  return rc;
}

std::map<std::string, std::string> artifacts(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    out[std::filesystem::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return out;
}

Outcome determinism() {
  TempDir dir;
  bool ok = true;
  for (const char* run : {"run1", "run2"}) {
    const auto root = dir / run;
    std::filesystem::create_directories(root / "analysis");
    const auto csv = (root / "stream.csv").string();
    ok = ok && cli({"generate", "--output", csv, "--nv", "16384", "--windows", "12", "--seed",
                    "1111"}) == 0;
    ok = ok && cli({"analyze", "-i", csv, "--nv", "16384", "-o", (root / "analysis").string()}) == 0;
    ok = ok && cli({"fit", "-i", csv, "--nv", "16384", "-o", (root / "fit").string()}) == 0;
  }
  if (!ok) return {false, "pipeline command failed"};
  auto a = artifacts(dir / "run1");
  auto b = artifacts(dir / "run2");
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  differing += b.size() - std::min(b.size(), a.size());
  return {differing == 0 && a.size() == b.size() && a.size() > 5,
          std::to_string(a.size()) + " artifacts compared, " + std::to_string(differing) +
              " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "sum identity", sum_identity},
      {2, "permutation invariance", permutation_invariance},
      {3, "subrange partition", subrange_partition},
      {4, "dense-oracle equivalence", dense_oracle},
      {5, "scaling-law constants", scaling_constants},
      {6, "Zipf-Mandelbrot round trip", zipf_round_trip},
      {7, "modified-Cauchy round trip", cauchy_round_trip},
      {8, "cross-correlation closure", cross_correlation_closure},
      {9, "model predicates", model_predicates},
      {10, "throughput floor", throughput},
      {11, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": "
              << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
