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

#include "tlns/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

#include "json.hpp"

#include "tlns/error.hpp"

namespace tlns {

using Json = nlohmann::ordered_json;

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

void append_count(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double as_double(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------

std::string matrix_tsv(const TrafficMatrix& m) {
  std::string out;
  out.reserve(m.nnz() * 32);
  for (const auto& e : m.entries()) {
    out += to_string(e.src);
    out += '\t';
    out += to_string(e.dst);
    out += '\t';
    append_count(out, e.count);
    out += '\n';
  }
  return out;
}

std::string matrix_sidecar_json(const TrafficMatrix& m) {
  Json j;
  j["n_valid"] = m.n_valid();
  j["parent_n_valid"] = m.meta().parent_n_valid;
  j["window_index"] = m.meta().window_index;
  j["time_span"] = {m.meta().start, m.meta().end};
  return dump(j);
}

TrafficMatrix parse_matrix(std::string_view tsv, std::string_view sidecar_json) {
  Json side;
  try {
    side = Json::parse(sidecar_json);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix sidecar: ") + e.what(), 0);
  }

  std::vector<MatrixEntry> entries;
  std::uint64_t line = 0;
  while (!tsv.empty()) {
    ++line;
    const auto nl = tsv.find('\n');
    const std::string_view row = tsv.substr(0, nl);
    tsv = nl == std::string_view::npos ? std::string_view{} : tsv.substr(nl + 1);
    if (row.empty()) continue;
    const auto t1 = row.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : row.find('\t', t1 + 1);
    MatrixEntry e;
    bool ok = t2 != std::string_view::npos && parse_address(row.substr(0, t1), e.src) &&
              parse_address(row.substr(t1 + 1, t2 - t1 - 1), e.dst);
    if (ok) {
      const auto count = row.substr(t2 + 1);
      auto [p, ec] = std::from_chars(count.data(), count.data() + count.size(), e.count);
      ok = ec == std::errc{} && p == count.data() + count.size();
    }
    if (!ok) throw ParseError("malformed matrix row " + std::to_string(line), line);
    entries.push_back(e);
  }

  MatrixMeta meta;
  try {
    meta.window_index = side.at("window_index").get<std::uint64_t>();
    meta.start = side.at("time_span").at(0).get<Timestamp>();
    meta.end = side.at("time_span").at(1).get<Timestamp>();
    meta.parent_n_valid = side.at("parent_n_valid").get<Count>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix sidecar: ") + e.what(), 0);
  }
  auto m = TrafficMatrix::from_entries(std::move(entries), meta);
  if (m.n_valid() != side.at("n_valid").get<Count>()) {
    throw ParseError("matrix sidecar n_valid does not match the entry total", 0);
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

void tsv_row(std::string& out, double x, double value, double sigma, Count n) {
  out += format_double(x);
  out += '\t';
  out += format_double(value);
  out += '\t';
  out += format_double(sigma);
  out += '\t';
  append_count(out, n);
}

}  // namespace

std::string histogram_tsv(const DegreeHistogram& h) {
  std::string out = "x\tvalue\tsigma\tn\n";
  for (const auto& b : h.bins) {
    const double norm = static_cast<double>(h.total) * b.width();
    tsv_row(out, b.center(), h.probability(b), b.sigma() / norm, b.count);
    out += '\n';
  }
  return out;
}

std::string curve_tsv(const CorrelationCurve& c) {
  std::string out = "x\tvalue\tsigma\tn\n";
  for (const auto& p : c.points) {
    tsv_row(out, p.x, p.probability, p.sigma(), p.n);
    out += '\n';
  }
  return out;
}

std::string cross_correlation_tsv(const CrossCorrelation& c) {
  std::string out = "x\tvalue\tsigma\tn\tmodel\n";
  for (const auto& b : c.buckets) {
    tsv_row(out, b.bucket, b.probability, b.sigma(), b.n);
    out += '\t';
    out += format_double(b.model);
    out += '\n';
  }
  return out;
}

std::string aggregates_tsv_header() {
  std::string out = "window";
  for (auto a : kAllAggregates) {
    out += '\t';
    out += aggregate_name(a);
  }
  out += '\n';
  return out;
}

std::string aggregates_tsv_row(std::uint64_t window, const NetworkAggregates& a) {
  std::string out;
  append_count(out, window);
  for (auto q : kAllAggregates) {
    out += '\t';
    append_count(out, a.get(q));
  }
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------

std::string fit_json(const ScalingFit& f) {
  Json j;
  j["law"] = "window_scaling";
  j["quantity"] = f.quantity;
  j["gamma"] = f.gamma;
  j["coefficient"] = f.coefficient;
  j["residual"] = f.residual;
  j["gamma_stderr"] = number_or_null(f.gamma_stderr);
  j["raw_slope"] = f.raw_slope;
  j["clamped"] = f.clamped;
  j["samples"] = f.samples;
  return dump(j);
}

std::string fit_json(const ZipfMandelbrotFit& f) {
  Json j;
  j["law"] = "zipf_mandelbrot";
  j["delta"] = f.delta;
  j["lambda"] = f.lambda;
  j["scale"] = f.scale;
  j["residual"] = f.residual;
  j["delta_stderr"] = number_or_null(f.delta_stderr);
  j["lambda_stderr"] = number_or_null(f.lambda_stderr);
  j["bins"] = f.bins;
  j["samples"] = f.samples;
  return dump(j);
}

std::string fit_json(const CauchyFit& f) {
  Json j;
  j["law"] = "modified_cauchy";
  j["alpha"] = f.alpha;
  j["beta"] = f.beta;
  j["t_half"] = f.t_half();
  j["residual"] = f.residual;
  j["alpha_stderr"] = number_or_null(f.alpha_stderr);
  j["beta_stderr"] = number_or_null(f.beta_stderr);
  j["t_half_stderr"] = number_or_null(f.t_half_stderr);
  j["points"] = f.points;
  return dump(j);
}

// ---------------------------------------------------------------------------

std::string model_json(const ModelParameters& p) {
  const auto& pv = p.provenance;
  Json j;
  j["site_label"] = p.site_label;
  j["gamma"] = p.gamma;
  j["delta"] = p.delta;
  j["lambda"] = p.lambda;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["t_half"] = p.t_half();
  Json prov;
  prov["n_valid"] = pv.n_valid;
  prov["windows"] = pv.windows;
  prov["window_scaling"] = {{"quantity", pv.window_scaling.quantity},
                            {"coefficient", pv.coefficient},
                            {"residual", pv.window_scaling.residual},
                            {"samples", pv.window_scaling.samples},
                            {"gamma_stderr", number_or_null(pv.gamma_stderr)},
                            {"clamped", pv.gamma_clamped}};
  prov["zipf_mandelbrot"] = {{"quantity", pv.zipf_mandelbrot.quantity},
                             {"scale", pv.scale},
                             {"residual", pv.zipf_mandelbrot.residual},
                             {"samples", pv.zipf_mandelbrot.samples},
                             {"delta_stderr", number_or_null(pv.delta_stderr)},
                             {"lambda_stderr", number_or_null(pv.lambda_stderr)}};
  prov["modified_cauchy"] = {{"quantity", pv.modified_cauchy.quantity},
                             {"residual", pv.modified_cauchy.residual},
                             {"samples", pv.modified_cauchy.samples},
                             {"alpha_stderr", number_or_null(pv.alpha_stderr)},
                             {"beta_stderr", number_or_null(pv.beta_stderr)}};
  j["provenance"] = std::move(prov);
  return dump(j);
}

ModelParameters parse_model_json(std::string_view text) {
  ModelParameters p;
  try {
    const Json j = Json::parse(text);
    p.site_label = j.value("site_label", std::string{});
    p.gamma = j.at("gamma").get<double>();
    p.delta = j.at("delta").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    if (j.contains("provenance")) {
      const auto& prov = j.at("provenance");
      auto& pv = p.provenance;
      pv.n_valid = prov.value("n_valid", Count{0});
      pv.windows = prov.value("windows", std::uint64_t{0});
      auto law = [&](const char* key, LawProvenance& out) -> const Json* {
        if (!prov.contains(key)) return nullptr;
        const auto& l = prov.at(key);
        out.quantity = l.value("quantity", std::string{});
        out.residual = as_double(l.value("residual", Json(nullptr)));
        out.samples = l.value("samples", std::uint64_t{0});
        return &l;
      };
      if (const auto* l = law("window_scaling", pv.window_scaling)) {
        pv.coefficient = as_double(l->value("coefficient", Json(nullptr)));
        pv.gamma_stderr = as_double(l->value("gamma_stderr", Json(nullptr)));
        pv.gamma_clamped = l->value("clamped", false);
      }
      if (const auto* l = law("zipf_mandelbrot", pv.zipf_mandelbrot)) {
        pv.scale = as_double(l->value("scale", Json(nullptr)));
        pv.delta_stderr = as_double(l->value("delta_stderr", Json(nullptr)));
        pv.lambda_stderr = as_double(l->value("lambda_stderr", Json(nullptr)));
      }
      if (const auto* l = law("modified_cauchy", pv.modified_cauchy)) {
        pv.alpha_stderr = as_double(l->value("alpha_stderr", Json(nullptr)));
        pv.beta_stderr = as_double(l->value("beta_stderr", Json(nullptr)));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what(), 0);
  }
  p.validate();
  return p;
}

std::string observability_json(const ObservabilityQuery& q, const ObservabilityScore& s) {
  Json j;
  j["n_valid"] = q.n_valid;
  j["d"] = q.d;
  j["t"] = q.t;
  j["raw_score"] = s.raw;
  j["probability"] = s.probability;
  j["normalized_score"] = s.normalized;
  j["reference_score"] = s.reference;
  j["zero_visibility"] = s.zero_visibility;
  j["factors"] = {{"window", s.factors.window},
                  {"intensity", s.factors.intensity},
                  {"revisit", s.factors.revisit},
                  {"visibility", s.factors.visibility}};
  return dump(j);
}

std::string generation_sidecar_json(const SyntheticScenario& s, const GenerationReport& r) {
  Json j;
  j["scenario"] = {
      {"n_sources", s.n_sources},
      {"zm", {{"delta", s.zm_delta}, {"lambda", s.zm_lambda}, {"d_max", s.zm_d_max}}},
      {"cauchy", {{"alpha", s.cauchy_alpha}, {"beta", s.cauchy_beta}}},
      {"n_windows", s.n_windows},
      {"n_valid", s.n_valid},
      {"seed", s.seed},
      {"observer_b_rule",
       s.observer_b_rule == ObserverRule::kModelVisibility ? "model_visibility" : "none"},
      {"destinations",
       {{"pool", s.dest_pool}, {"delta", s.dest_delta}, {"lambda", s.dest_lambda}}},
      {"start_us", s.start_us},
  };
  j["sources_used"] = r.sources_used;
  j["packets"] = r.packets;
  Json windows = Json::array();
  for (const auto& w : r.windows) {
    windows.push_back({{"index", w.index},
                       {"sources", w.sources},
                       {"arrivals", w.arrivals},
                       {"truncated", w.truncated},
                       {"trimmed", w.trimmed}});
  }
  j["windows"] = std::move(windows);
  return dump(j);
}

}  // namespace tlns
