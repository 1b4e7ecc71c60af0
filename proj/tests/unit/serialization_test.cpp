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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_support.hpp"
#include "tlns/error.hpp"
#include "tlns/serialization.hpp"

namespace tlns {
namespace {

using nlohmann::json;
using testing::Rng;
using testing::TempDir;

std::set<std::string> keys_of(const std::string& text) {
  std::set<std::string> out;
  const auto doc = json::parse(text);
  for (const auto& [k, v] : doc.items()) out.insert(k);
  return out;
}

TEST(MatrixText, TinyExampleLayout) {
  std::vector<PacketRecord> records = {{1, 4, 8}, {2, 4, 8}, {3, 5, 8}};
  auto m = build_matrix(records, {2, 1, 3, 3});
  EXPECT_EQ(matrix_tsv(m), "4\t8\t2\n5\t8\t1\n");
  auto side = json::parse(matrix_sidecar_json(m));
  EXPECT_EQ(side["n_valid"], 3);
  EXPECT_EQ(side["window_index"], 2);
  EXPECT_EQ(side["time_span"], json::array({1, 3}));
}

TEST(MatrixText, ByteExactRoundTrip) {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    auto records = rng.skewed_records(rng.between(1, 4000), 300);
    if (trial % 3 == 0) {
      for (auto& r : records) r.src = make_address(rng.below(4), static_cast<std::uint64_t>(r.src));
    }
    auto m = build_matrix(records, {static_cast<std::uint64_t>(trial), 10, 20, records.size()});
    const auto tsv = matrix_tsv(m);
    const auto side = matrix_sidecar_json(m);
    auto back = parse_matrix(tsv, side);
    EXPECT_EQ(back, m);
    EXPECT_EQ(matrix_tsv(back), tsv);
    EXPECT_EQ(matrix_sidecar_json(back), side);
  }
}

TEST(MatrixText, SubrangeKeepsParentSize) {
  auto m = TrafficMatrix::from_entries({{4, 8, 2}, {5, 8, 1}}, {0, 0, 0, 3});
  auto inc = subrange_include(m, RangeMask({4, 8}));
  auto back = parse_matrix(matrix_tsv(inc), matrix_sidecar_json(inc));
  EXPECT_EQ(back.n_valid(), 2u);
  EXPECT_EQ(back.meta().parent_n_valid, 3u);
}

TEST(MatrixText, RejectsMalformedInput) {
  const std::string side = R"({"n_valid":2,"parent_n_valid":2,"window_index":0,"time_span":[0,1]})";
  EXPECT_THROW(parse_matrix("4\t8\n", side), ParseError);
  EXPECT_THROW(parse_matrix("4\t8\tx\n", side), ParseError);
  EXPECT_THROW(parse_matrix("4\t8\t3\n", side), ParseError);
  EXPECT_THROW(parse_matrix("4\t8\t2\n", "{"), ParseError);
  EXPECT_NO_THROW(parse_matrix("4\t8\t2\n", side));
}

TEST(PlotTables, HistogramRows) {
  std::vector<Count> v = {1, 1, 2, 4};
  EXPECT_EQ(histogram_tsv(histogram(v)),
            "x\tvalue\tsigma\tn\n"
            "1\t0.5\t" + format_double(std::sqrt(2.0) / 4) + "\t2\n"
            "2\t0.25\t0.25\t1\n"
            "4\t0.25\t0.25\t1\n");
}

TEST(PlotTables, CurveRows) {
  CorrelationCurve c;
  c.points = {{0, 1, 100, 5}, {1, 0.5, 100, 4}};
  EXPECT_EQ(curve_tsv(c), "x\tvalue\tsigma\tn\n0\t1\t0\t100\n1\t0.5\t0.05\t100\n");
}

TEST(PlotTables, AggregateHeaderAndRow) {
  EXPECT_EQ(aggregates_tsv_header(),
            "window\tvalid_packets\tunique_links\tmax_link_packets\tunique_sources\t"
            "max_source_packets\tmax_source_fanout\tunique_destinations\tmax_dest_packets\t"
            "max_dest_fanin\n");
  NetworkAggregates a{3, 2, 2, 2, 2, 1, 1, 3, 2};
  EXPECT_EQ(aggregates_tsv_row(0, a), "0\t3\t2\t2\t2\t2\t1\t1\t3\t2\n");
}

TEST(FitDocuments, UseTheDocumentedParameterNames) {
  ScalingFit s;
  s.gamma = 0.5;
  s.coefficient = 2;
  EXPECT_TRUE(keys_of(fit_json(s)).count("gamma"));
  EXPECT_TRUE(keys_of(fit_json(s)).count("coefficient"));
  EXPECT_TRUE(keys_of(fit_json(s)).count("residual"));

  ZipfMandelbrotFit z;
  z.lambda = 2;
  z.delta_stderr = NAN;
  auto zk = keys_of(fit_json(z));
  for (const char* k : {"delta", "lambda", "scale", "residual"}) EXPECT_TRUE(zk.count(k)) << k;
  EXPECT_TRUE(json::parse(fit_json(z))["delta_stderr"].is_null());

  CauchyFit c;
  c.alpha = 1;
  c.beta = 5;
  auto cj = json::parse(fit_json(c));
  EXPECT_EQ(cj["t_half"], 5.0);
  for (const char* k : {"alpha", "beta", "t_half", "residual"}) EXPECT_TRUE(cj.contains(k)) << k;
}

ModelParameters sample_model() {
  ModelParameters p;
  p.gamma = 0.51234567891234;
  p.delta = 0.91;
  p.lambda = 1.9571;
  p.alpha = 0.8123;
  p.beta = 10.4;
  p.site_label = "lab \"tap\" 1";
  auto& pv = p.provenance;
  pv.window_scaling = {"unique_sources", 0.01, 240};
  pv.zipf_mandelbrot = {"source_packets", 0.2, 4'000'000};
  pv.modified_cauchy = {"sources", 0.003, 15};
  pv.gamma_stderr = 0.002;
  pv.delta_stderr = 0.05;
  pv.lambda_stderr = 0.01;
  pv.alpha_stderr = 0.02;
  pv.beta_stderr = 0.3;
  pv.coefficient = 3.3;
  pv.scale = 0.4;
  pv.n_valid = 1 << 20;
  pv.windows = 16;
  return p;
}

TEST(ModelDocument, RoundTripsExactly) {
  auto p = sample_model();
  const auto text = model_json(p);
  auto back = parse_model_json(text);
  EXPECT_EQ(back, p);
  EXPECT_EQ(model_json(back), text);
  auto j = json::parse(text);
  for (const char* k : {"gamma", "delta", "lambda", "alpha", "beta", "t_half", "provenance"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_DOUBLE_EQ(j["t_half"].get<double>(), p.t_half());
}

TEST(ModelDocument, RejectsBrokenDocuments) {
  EXPECT_THROW(parse_model_json("not json"), ParseError);
  EXPECT_THROW(parse_model_json(R"({"gamma":0.5})"), ParseError);
  EXPECT_THROW(
      parse_model_json(R"({"gamma":2,"delta":1,"lambda":2,"alpha":0.8,"beta":10})"),
      DomainError);
  EXPECT_NO_THROW(
      parse_model_json(R"({"gamma":0.5,"delta":1,"lambda":2,"alpha":0.8,"beta":10})"));
}

TEST(ObservabilityDocument, CarriesScoresAndFactors) {
  ObservabilityQuery q{1 << 20, 1 << 10, 0};
  ObservabilityScore s;
  s.raw = 2;
  s.probability = 1;
  s.factors = {1, 2, 3, 4};
  auto j = json::parse(observability_json(q, s));
  EXPECT_EQ(j["raw_score"], 2.0);
  EXPECT_EQ(j["probability"], 1.0);
  EXPECT_EQ(j["factors"]["visibility"], 4.0);
  EXPECT_EQ(j["d"], 1024);
}

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(NAN), "nan");
}

TEST(TextFiles, WriteThenRead) {
  TempDir dir;
  write_text_file(dir / "x.txt", std::string("a\0b", 3));
  EXPECT_EQ(read_text_file(dir / "x.txt"), std::string("a\0b", 3));
  EXPECT_THROW(read_text_file(dir / "missing"), Error);
}

}  // namespace
}  // namespace tlns
