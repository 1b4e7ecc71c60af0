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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlns/anonymize.hpp"
#include "tlns/error.hpp"
#include "tlns/generator.hpp"
#include "tlns/ingest.hpp"
#include "tlns/model.hpp"
#include "tlns/serialization.hpp"
#include "tlns/site_model.hpp"
#include "tlns/statistics.hpp"
#include "tlns/traffic_matrix.hpp"

namespace tlns::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string input;
  std::string format = "auto";
  Count nv = 0;
  std::string filter;
  bool anonymize = false;
  std::string key_env;
  std::string key_file;
  std::uint64_t max_regression_us = 0;
  std::string output_dir;
};

void add_output_dir(CLI::App* sub, std::string& dir) {
  sub->add_option("--output-dir,-o", dir, "Directory for output tables and JSON");
}

void add_input_options(CLI::App* sub, InputOptions& o) {
  sub->add_option("--input,-i", o.input, "Packet record file; .gz is decompressed")->required();
  sub->add_option("--nv", o.nv, "Valid packets per window")
      ->required()
      ->check(CLI::PositiveNumber);
  sub->add_option("--format", o.format, "Input format: auto, csv or binary")
      ->check(CLI::IsMember({"auto", "csv", "binary"}));
  sub->add_option("--filter", o.filter, "Validity filter, e.g. 'src=0-255;dst=7;time=100-200'");
  auto* anon = sub->add_flag("--anonymize", o.anonymize, "Relabel ids with a keyed permutation");
  auto* env = sub->add_option("--key-env", o.key_env,
                              "Environment variable holding the 64-hex-digit key");
  auto* file = sub->add_option("--key-file", o.key_file,
                               "File holding the key (32 raw bytes or 64 hex digits)");
  env->excludes(file)->needs(anon);
  file->excludes(env)->needs(anon);
  sub->add_option("--max-regression-us", o.max_regression_us,
                  "Tolerated backwards timestamp step in microseconds");
  add_output_dir(sub, o.output_dir);
}

std::optional<Anonymizer> make_anonymizer(const InputOptions& o) {
  if (!o.anonymize) return std::nullopt;
  if (o.key_env.empty() && o.key_file.empty()) {
    throw UsageError("--anonymize needs --key-env or --key-file");
  }
  try {
    return Anonymizer(o.key_env.empty() ? load_key_file(o.key_file)
                                        : load_key_env(o.key_env.c_str()));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

PacketFilter make_filter(const std::string& spec) {
  if (spec.empty()) return {};
  try {
    return PacketFilter::parse(spec);
  } catch (const DomainError& e) {
    throw UsageError(std::string("--filter: ") + e.what());
  }
}

/// Reader -> filter -> fixed windows -> optional relabeling.
class Pipeline {
 public:
  explicit Pipeline(const InputOptions& o)
      : reader_(RecordReader::open(o.input, parse_format(o.format), {o.max_regression_us})),
        stream_(reader_, make_filter(o.filter), WindowSpec{o.nv}),
        anon_(make_anonymizer(o)) {}

  std::optional<Window> next() {
    auto w = stream_.next();
    if (w && anon_) anonymize_records(w->records, *anon_);
    return w;
  }
  const StreamStats& stats() const { return stream_.stats(); }
  const std::optional<Anonymizer>& anonymizer() const { return anon_; }

 private:
  RecordReader reader_;
  WindowStream stream_;
  std::optional<Anonymizer> anon_;
};

/// Writes `name` under the output directory, or to `out` when there is none.
void emit(const std::string& dir, const std::string& name, const std::string& text,
          std::ostream& out) {
  if (dir.empty()) {
    out << text;
    return;
  }
  fs::create_directories(dir);
  write_text_file(fs::path(dir) / name, text);
}

void require_windows(const StreamStats& s) {
  if (s.windows == 0) {
    throw Error("no complete windows: " + std::to_string(s.records_read) + " records read, " +
                std::to_string(s.records_rejected) + " rejected by the filter, " +
                std::to_string(s.dropped) + " left in a partial window");
  }
}

void report_stats(const StreamStats& s, std::ostream& err) {
  err << "windows=" << s.windows << " records=" << s.records_read
      << " rejected=" << s.records_rejected << " dropped=" << s.dropped << "\n";
}

std::string stats_json(const StreamStats& s) {
  nlohmann::ordered_json j;
  j["windows"] = s.windows;
  j["records_read"] = s.records_read;
  j["records_rejected"] = s.records_rejected;
  j["dropped"] = s.dropped;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  InputOptions in;
  std::uint64_t group = 0;
};

int analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  Pipeline p(o.in);
  std::string table = aggregates_tsv_header();
  std::map<DegreeQuantity, DegreeHistogram> hist;
  std::uint64_t in_group = 0;
  std::uint64_t group_index = 0;
  const bool write_hist = !o.in.output_dir.empty();

  auto flush_group = [&](bool suffixed) {
    for (const auto& [q, h] : hist) {
      std::string name = std::string("hist_") + degree_quantity_name(q);
      if (suffixed) name += "_" + std::to_string(group_index);
      emit(o.in.output_dir, name + ".tsv", histogram_tsv(h), out);
    }
    hist.clear();
    in_group = 0;
    ++group_index;
  };

  while (auto w = p.next()) {
    const TrafficMatrix m = build_matrix(*w);
    table += aggregates_tsv_row(w->index, aggregates(m));
    if (!write_hist) continue;
    const DegreeVectors dv = degree_vectors(m);
    for (auto q : kAllDegreeQuantities) {
      const auto values = degree_values(dv, q);
      auto h = histogram(values);
      auto it = hist.find(q);
      if (it == hist.end()) {
        hist.emplace(q, std::move(h));
      } else {
        merge_into(it->second, h);
      }
    }
    if (o.group > 0 && ++in_group == o.group) flush_group(true);
  }
  require_windows(p.stats());
  if (write_hist && !hist.empty()) flush_group(o.group > 0);
  emit(o.in.output_dir, "aggregates.tsv", table, out);
  if (write_hist) emit(o.in.output_dir, "summary.json", stats_json(p.stats()), out);
  report_stats(p.stats(), err);
  return kOk;
}

// ---------------------------------------------------------------------------

struct FitOptions {
  InputOptions in;
  std::string scaling_quantity = "unique_sources";
  std::string zm_quantity = "source_packets";
  int octaves = 4;
  std::size_t max_lag = 32;
  std::string site_label;
};

std::string scaling_tsv(std::span<const WindowAnalysis> windows) {
  std::map<Count, std::vector<double>> by_size;
  for (const auto& w : windows) {
    for (const auto& s : w.scaling_samples) by_size[s.n_valid].push_back(s.value);
  }
  std::string out = "x\tvalue\tsigma\tn\n";
  for (const auto& [n, values] : by_size) {
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double k = static_cast<double>(values.size());
    const double sigma = values.size() > 1 ? std::sqrt(var / (k - 1) / k) : 0.0;
    out += std::to_string(n) + "\t" + format_double(mean) + "\t" + format_double(sigma) + "\t" +
           std::to_string(values.size()) + "\n";
  }
  return out;
}

int fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  SiteModelConfig cfg;
  try {
    cfg.scaling_quantity = parse_aggregate(o.scaling_quantity);
    cfg.zm_quantity = parse_degree_quantity(o.zm_quantity);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  cfg.scaling_octaves = o.octaves;
  cfg.max_lag = o.max_lag;
  cfg.site_label = o.site_label;

  Pipeline p(o.in);
  std::vector<WindowAnalysis> windows;
  while (auto w = p.next()) windows.push_back(analyze_window(*w, cfg));
  report_stats(p.stats(), err);

  const SiteFits fits = fit_site_laws(windows, cfg);
  const ModelParameters params = assemble_parameters(fits, windows, cfg);
  const std::string model = model_json(params);
  if (!o.in.output_dir.empty()) {
    const auto& dir = o.in.output_dir;
    emit(dir, "model.json", model, out);
    emit(dir, "fit_window_scaling.json", fit_json(fits.scaling), out);
    emit(dir, "fit_zipf_mandelbrot.json", fit_json(fits.zipf_mandelbrot), out);
    emit(dir, "fit_modified_cauchy.json", fit_json(fits.cauchy), out);
    emit(dir, "scaling.tsv", scaling_tsv(windows), out);
    emit(dir, std::string("hist_") + o.zm_quantity + ".tsv", histogram_tsv(fits.histogram), out);
    emit(dir, "selfcorr.tsv", curve_tsv(fits.self_correlation), out);
  }
  out << model;
  return kOk;
}

// ---------------------------------------------------------------------------

struct SelfCorrOptions {
  InputOptions in;
  std::size_t max_lag = 32;
  bool fit = false;
};

int selfcorr(const SelfCorrOptions& o, std::ostream& out, std::ostream& err) {
  Pipeline p(o.in);
  std::vector<std::vector<Address>> sets;
  while (auto w = p.next()) sets.push_back(source_set(build_matrix(*w)));
  require_windows(p.stats());
  report_stats(p.stats(), err);
  const std::size_t lag = std::min(o.max_lag, sets.size() - 1);
  const CorrelationCurve curve = self_correlation(sets, lag);
  emit(o.in.output_dir, "selfcorr.tsv", curve_tsv(curve), out);
  if (o.fit) emit(o.in.output_dir, "fit_modified_cauchy.json", fit_json(fit_modified_cauchy(curve)), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct CrossCorrOptions {
  InputOptions in;
  std::string input_b;
};

int crosscorr(const CrossCorrOptions& o, std::ostream& out, std::ostream& err) {
  if (o.in.nv < 4) throw UsageError("--nv must be >= 4 for cross correlation");
  Pipeline p(o.in);

  auto reader = RecordReader::open(o.input_b, parse_format(o.in.format),
                                   {o.in.max_regression_us});
  std::vector<PacketRecord> b = read_all(reader);
  if (p.anonymizer()) anonymize_records(b, *p.anonymizer());
  std::stable_sort(b.begin(), b.end(), [](const PacketRecord& x, const PacketRecord& y) {
    return x.timestamp < y.timestamp;
  });

  std::vector<ObservedWindow> a_windows;
  std::vector<SeenWindow> b_windows;
  std::size_t cursor = 0;
  while (auto w = p.next()) {
    const TrafficMatrix m = build_matrix(*w);
    a_windows.push_back({w->index, degree_vectors(m).source_packets});
    while (cursor < b.size() && b[cursor].timestamp < w->start) ++cursor;
    SeenWindow seen{w->index, {}};
    for (std::size_t k = cursor; k < b.size() && b[k].timestamp <= w->end; ++k) {
      seen.sources.push_back(b[k].src);
    }
    std::sort(seen.sources.begin(), seen.sources.end());
    seen.sources.erase(std::unique(seen.sources.begin(), seen.sources.end()),
                       seen.sources.end());
    b_windows.push_back(std::move(seen));
  }
  require_windows(p.stats());
  report_stats(p.stats(), err);
  const CrossCorrelation cc = cross_correlation(a_windows, b_windows, o.in.nv);
  emit(o.in.output_dir, "crosscorr.tsv", cross_correlation_tsv(cc), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct PredictOptions {
  std::string model;
  Count nv = 0;
  Count d = 0;
  double t = 0;
};

int predict(const PredictOptions& o, std::ostream& out) {
  const ModelParameters params = parse_model_json(read_text_file(o.model));
  const ObservabilityQuery q{o.nv, o.d, o.t};
  out << observability_json(q, observability_score(params, q));
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenerateOptions {
  SyntheticScenario scenario;
  std::string output;
  std::string output_b;
  std::string output_dir;
  bool two_observers = false;
};

int generate(GenerateOptions o, std::ostream& out) {
  if (o.output.empty() && o.output_dir.empty()) {
    throw UsageError("generate needs --output or --output-dir");
  }
  fs::path a = o.output;
  if (a.empty()) {
    fs::create_directories(o.output_dir);
    a = fs::path(o.output_dir) / (o.two_observers ? "observer_a.csv" : "stream.csv");
  }
  if (!o.two_observers) {
    out << generate_stream(o.scenario, a).string() << "\n";
    return kOk;
  }
  fs::path b = o.output_b;
  if (b.empty()) b = a.parent_path() / "observer_b.csv";
  o.scenario.observer_b_rule = ObserverRule::kModelVisibility;
  out << generate_two_observers(o.scenario, a, b).sidecar.string() << "\n";
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic matrix analytics: windowed aggregates, law fits and synthetic streams",
               "tlns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tlns 0.1.0");

  AnalyzeOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Per-window aggregates and degree histograms");
  add_input_options(analyze_cmd, analyze_opts.in);
  analyze_cmd->add_option("--group", analyze_opts.group,
                          "Windows per histogram group; 0 pools every window");

  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the site model and print it as JSON");
  add_input_options(fit_cmd, fit_opts.in);
  fit_cmd->add_option("--scaling-quantity", fit_opts.scaling_quantity,
                      "Aggregate fed to the window-scaling fit");
  fit_cmd->add_option("--zm-quantity", fit_opts.zm_quantity,
                      "Degree quantity fed to the Zipf-Mandelbrot fit");
  fit_cmd->add_option("--octaves", fit_opts.octaves, "Window sizes nv/2^k, k < octaves")
      ->check(CLI::Range(3, 16));
  fit_cmd->add_option("--max-lag", fit_opts.max_lag, "Largest self-correlation lag")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--site-label", fit_opts.site_label, "Free-text site label");

  SelfCorrOptions self_opts;
  auto* self_cmd = app.add_subcommand("selfcorr", "Source revisit probability by window lag");
  add_input_options(self_cmd, self_opts.in);
  self_cmd->add_option("--max-lag", self_opts.max_lag, "Largest lag")
      ->check(CLI::PositiveNumber);
  self_cmd->add_flag("--fit", self_opts.fit, "Also fit the revisit law")
      ->needs(self_cmd->get_option("--output-dir"));

  CrossCorrOptions cross_opts;
  auto* cross_cmd =
      app.add_subcommand("crosscorr", "Second-observer visibility by packet-count bucket");
  add_input_options(cross_cmd, cross_opts.in);
  cross_cmd->add_option("--input-b", cross_opts.input_b, "Observer B record file")->required();

  PredictOptions predict_opts;
  auto* predict_cmd = app.add_subcommand("predict", "Evaluate the observability model");
  predict_cmd->add_option("--model,-m", predict_opts.model, "Model JSON from 'fit'")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--nv", predict_opts.nv, "Window size")->required();
  predict_cmd->add_option("--d", predict_opts.d, "Source packet count")->required();
  predict_cmd->add_option("--t", predict_opts.t, "Lag in windows");

  GenerateOptions gen_opts;
  auto& sc = gen_opts.scenario;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic stream and its ground truth");
  auto* output = gen_cmd->add_option("--output", gen_opts.output, "CSV path");
  auto* output_dir = gen_cmd->add_option("--output-dir,-o", gen_opts.output_dir,
                                         "Directory for stream.csv or observer_[ab].csv");
  output->excludes(output_dir);
  output_dir->excludes(output);
  auto* two = gen_cmd->add_flag("--two-observers", gen_opts.two_observers,
                                "Also emit observer B by the visibility rule");
  gen_cmd->add_option("--output-b", gen_opts.output_b, "Observer B CSV path")->needs(two);
  gen_cmd->add_option("--seed", sc.seed, "RNG seed");
  gen_cmd->add_option("--nv", sc.n_valid, "Packets per window")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--windows", sc.n_windows, "Window count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--sources", sc.n_sources, "Source population cap")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--zm-delta", sc.zm_delta, "Intensity law offset");
  gen_cmd->add_option("--zm-lambda", sc.zm_lambda, "Intensity law exponent");
  gen_cmd->add_option("--d-max", sc.zm_d_max, "Largest per-window source intensity");
  gen_cmd->add_option("--alpha", sc.cauchy_alpha, "Revisit law exponent, in (0, 1]");
  gen_cmd->add_option("--beta", sc.cauchy_beta, "Revisit law scale");
  gen_cmd->add_option("--dest-pool", sc.dest_pool, "Destination pool size");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      return app.exit(e, out, err);
    }
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (analyze_cmd->parsed()) return analyze(analyze_opts, out, err);
    if (fit_cmd->parsed()) return fit(fit_opts, out, err);
    if (self_cmd->parsed()) return selfcorr(self_opts, out, err);
    if (cross_cmd->parsed()) return crosscorr(cross_opts, out, err);
    if (predict_cmd->parsed()) return predict(predict_opts, out);
    if (gen_cmd->parsed()) return generate(gen_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FitError& e) {
    err << "fit failed: " << e.what() << "\n";
    return kFitFailure;
  } catch (const InfeasibleScenario& e) {
    err << "error: " << e.what() << "\nrequired minimum population: " << e.required_sources()
        << "\n";
    return kDataError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace tlns::cli
