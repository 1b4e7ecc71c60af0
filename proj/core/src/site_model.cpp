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

#include "tlns/site_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tlns/error.hpp"
#include "tlns/statistics.hpp"

namespace tlns {

WindowAnalysis analyze_window(const Window& window, const SiteModelConfig& config) {
  WindowAnalysis a;
  a.index = window.index;
  const TrafficMatrix m = build_matrix(window);
  a.n_valid = m.n_valid();
  a.aggregates = aggregates(m);
  a.zm_values = degree_values(degree_vectors(m), config.zm_quantity);
  a.sources = source_set(m);

  const std::span<const PacketRecord> records(window.records);
  for (int k = 0; k < config.scaling_octaves; ++k) {
    const std::size_t size = records.size() >> k;
    if (size == 0) break;
    if (k == 0) {
      a.scaling_samples.push_back(
          {a.n_valid, static_cast<double>(a.aggregates.get(config.scaling_quantity))});
      continue;
    }
    for (std::size_t off = 0; off + size <= records.size(); off += size) {
      MatrixMeta meta{window.index, records[off].timestamp, records[off + size - 1].timestamp,
                      size};
      const TrafficMatrix sub = build_matrix(records.subspan(off, size), meta);
      a.scaling_samples.push_back(
          {sub.n_valid(), static_cast<double>(aggregates(sub).get(config.scaling_quantity))});
    }
  }
  return a;
}

namespace {

std::size_t intersection_size(const std::vector<Address>& a, const std::vector<Address>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// Lag curves share their windows, so residual scatter understates how much a
// fit moves between realizations. A delete-one-block jackknife over reference
// windows measures that directly; the larger of the two errors is kept.
void widen_cauchy_errors(CauchyFit& fit, const std::vector<std::vector<Address>>& sets,
                         const CorrelationCurve& curve, const SearchOptions& search) {
  constexpr std::size_t kBlocks = 8;
  std::vector<std::size_t> refs;
  for (std::size_t w = 0; w + 1 < sets.size(); ++w) {
    if (!sets[w].empty()) refs.push_back(w);
  }
  if (refs.size() < 2 * kBlocks) return;

  // ratio[k][i]: fraction of reference refs[k] present at lag of curve point i.
  std::vector<std::vector<double>> ratio(refs.size(),
                                         std::vector<double>(curve.points.size(), -1.0));
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const auto& base = sets[refs[k]];
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto t = static_cast<std::size_t>(curve.points[i].x);
      if (t == 0 || refs[k] + t >= sets.size()) continue;
      ratio[k][i] = static_cast<double>(intersection_size(base, sets[refs[k] + t])) /
                    static_cast<double>(base.size());
    }
  }

  std::vector<double> alphas;
  std::vector<double> log_betas;
  for (std::size_t g = 0; g < kBlocks; ++g) {
    const std::size_t lo = g * refs.size() / kBlocks;
    const std::size_t hi = (g + 1) * refs.size() / kBlocks;
    CorrelationCurve rep;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      auto point = curve.points[i];
      if (point.x != 0) {
        double sum = 0;
        std::size_t used = 0;
        for (std::size_t k = 0; k < refs.size(); ++k) {
          if ((k >= lo && k < hi) || ratio[k][i] < 0) continue;
          sum += ratio[k][i];
          ++used;
        }
        if (used == 0) continue;
        point.probability = sum / static_cast<double>(used);
      }
      rep.points.push_back(point);
    }
    const auto f = fit_modified_cauchy(rep, search);
    alphas.push_back(f.alpha);
    log_betas.push_back(std::log(f.beta));
  }

  auto jackknife_se = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double g = static_cast<double>(v.size());
    return std::sqrt((g - 1) / g * ss);
  };
  const double se_alpha = jackknife_se(alphas);
  const double se_log_beta = jackknife_se(log_betas);
  fit.alpha_stderr = std::max(fit.alpha_stderr, se_alpha);
  fit.beta_stderr = std::max(fit.beta_stderr, fit.beta * se_log_beta);
  const double th = fit.t_half();
  const double dth_dalpha = -th * std::log(fit.beta) / (fit.alpha * fit.alpha);
  const double dth_dlogbeta = th / fit.alpha;
  fit.t_half_stderr =
      std::max(fit.t_half_stderr, std::sqrt(dth_dalpha * dth_dalpha * se_alpha * se_alpha +
                                            dth_dlogbeta * dth_dlogbeta * se_log_beta *
                                                se_log_beta));
}

}  // namespace

SiteFits fit_site_laws(std::span<const WindowAnalysis> windows, const SiteModelConfig& config) {
  if (windows.empty()) throw FitError(Law::kWindowScaling, "no complete windows");
  SiteFits fits;

  // Every window size must be seen at least twice to have a spread estimate.
  std::map<Count, std::size_t> per_size;
  std::vector<ScalingSample> samples;
  for (const auto& w : windows) {
    for (const auto& s : w.scaling_samples) {
      ++per_size[s.n_valid];
      samples.push_back(s);
    }
  }
  for (const auto& [n, count] : per_size) {
    if (count < 2) {
      throw FitError(Law::kWindowScaling, "window size " + std::to_string(n) + " has " +
                                              std::to_string(count) +
                                              " sample(s); need >= 2 windows");
    }
  }
  fits.scaling = fit_window_scaling(samples, aggregate_name(config.scaling_quantity));

  bool first = true;
  for (const auto& w : windows) {
    if (w.zm_values.empty()) continue;
    auto h = histogram(w.zm_values);
    if (first) {
      fits.histogram = std::move(h);
      first = false;
    } else {
      merge_into(fits.histogram, h);
    }
  }
  if (first) throw FitError(Law::kZipfMandelbrot, "no degree values");
  fits.zipf_mandelbrot = fit_zipf_mandelbrot(fits.histogram, config.search);

  std::vector<std::vector<Address>> sets;
  sets.reserve(windows.size());
  for (const auto& w : windows) sets.push_back(w.sources);
  const std::size_t lag = std::min(config.max_lag, sets.size() - 1);
  try {
    fits.self_correlation = self_correlation(sets, lag);
  } catch (const DomainError& e) {
    throw FitError(Law::kModifiedCauchy, e.what());
  }
  fits.cauchy = fit_modified_cauchy(fits.self_correlation, config.search);
  widen_cauchy_errors(fits.cauchy, sets, fits.self_correlation, config.search);
  return fits;
}

ModelParameters assemble_parameters(const SiteFits& fits, std::span<const WindowAnalysis> windows,
                                    const SiteModelConfig& config) {
  ModelParameters p;
  p.gamma = fits.scaling.gamma;
  p.delta = fits.zipf_mandelbrot.delta;
  p.lambda = fits.zipf_mandelbrot.lambda;
  p.alpha = fits.cauchy.alpha;
  p.beta = fits.cauchy.beta;
  p.site_label = config.site_label;

  auto& pv = p.provenance;
  pv.window_scaling = {fits.scaling.quantity, fits.scaling.residual, fits.scaling.samples};
  pv.zipf_mandelbrot = {degree_quantity_name(config.zm_quantity), fits.zipf_mandelbrot.residual,
                        fits.zipf_mandelbrot.samples};
  pv.modified_cauchy = {"sources", fits.cauchy.residual, fits.cauchy.points};
  pv.gamma_stderr = fits.scaling.gamma_stderr;
  pv.delta_stderr = fits.zipf_mandelbrot.delta_stderr;
  pv.lambda_stderr = fits.zipf_mandelbrot.lambda_stderr;
  pv.alpha_stderr = fits.cauchy.alpha_stderr;
  pv.beta_stderr = fits.cauchy.beta_stderr;
  pv.coefficient = fits.scaling.coefficient;
  pv.scale = fits.zipf_mandelbrot.scale;
  pv.gamma_clamped = fits.scaling.clamped;
  pv.n_valid = windows.empty() ? 0 : windows.front().n_valid;
  pv.windows = windows.size();
  return p;
}

ModelParameters fit_site_model(std::span<const WindowAnalysis> windows,
                               const SiteModelConfig& config) {
  return assemble_parameters(fit_site_laws(windows, config), windows, config);
}

}  // namespace tlns
