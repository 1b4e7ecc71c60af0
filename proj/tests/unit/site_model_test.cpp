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
#include <map>
#include <string>
#include <vector>

#include "tlns/anonymize.hpp"
#include "tlns/error.hpp"
#include "tlns/generator.hpp"
#include "tlns/site_model.hpp"

namespace tlns {
namespace {

std::vector<WindowAnalysis> analyze(const SyntheticScenario& s, const SiteModelConfig& cfg = {},
                                    const Anonymizer* anon = nullptr) {
  StreamGenerator gen(s);
  std::vector<WindowAnalysis> out;
  while (auto w = gen.next()) {
    if (anon != nullptr) anonymize_records(w->records, *anon);
    out.push_back(analyze_window(*w, cfg));
  }
  return out;
}

// Expected distinct sources in a uniformly random m-packet subset of a
// window whose sources have packet counts `d`: each source is missed with
// hypergeometric probability C(N-d, m) / C(N, m).
double expected_unique(const std::vector<Count>& d, Count n, Count m) {
  const double big_n = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  double sum = 0;
  for (Count di : d) {
    const double dd = static_cast<double>(di);
    if (di > n - m) {
      sum += 1;
      continue;
    }
    const double log_miss = std::lgamma(big_n - dd + 1) - std::lgamma(big_n - dd - mm + 1) -
                            std::lgamma(big_n + 1) + std::lgamma(big_n - mm + 1);
    sum += 1 - std::exp(log_miss);
  }
  return sum;
}

SyntheticScenario reference_scenario(std::uint64_t seed) {
  SyntheticScenario s;
  s.n_valid = 1 << 20;
  s.n_windows = 16;
  s.n_sources = 4'000'000;
  s.zm_delta = 1.0;
  s.zm_lambda = 2.0;
  s.zm_d_max = 1000;
  s.cauchy_alpha = 0.8;
  s.cauchy_beta = 10.0;
  s.seed = seed;
  return s;
}

TEST(AnalyzeWindow, CollectsScalingSamplesPerOctave) {
  SyntheticScenario s;
  s.n_valid = 1 << 12;
  s.n_windows = 1;
  s.zm_d_max = 100;
  s.n_sources = 100'000;
  StreamGenerator gen(s);
  auto w = gen.next();
  SiteModelConfig cfg;
  auto a = analyze_window(*w, cfg);
  EXPECT_EQ(a.n_valid, s.n_valid);
  EXPECT_EQ(a.aggregates.valid_packets, s.n_valid);
  ASSERT_EQ(a.scaling_samples.size(), 1u + 2u + 4u + 8u);
  std::map<Count, int> sizes;
  for (const auto& smp : a.scaling_samples) ++sizes[smp.n_valid];
  EXPECT_EQ(sizes[s.n_valid], 1);
  EXPECT_EQ(sizes[s.n_valid / 8], 8);
  EXPECT_EQ(a.scaling_samples[0].value, static_cast<double>(a.aggregates.unique_sources));
  EXPECT_EQ(a.sources.size(), a.aggregates.unique_sources);
  EXPECT_EQ(a.zm_values.size(), a.aggregates.unique_sources);
}

TEST(FitSiteModel, SingleWindowFailsInTheScalingLaw) {
  SyntheticScenario s;
  s.n_valid = 1 << 12;
  s.n_windows = 1;
  s.zm_d_max = 100;
  s.n_sources = 100'000;
  auto windows = analyze(s);
  try {
    fit_site_model(windows);
    FAIL() << "expected a fit error";
  } catch (const FitError& e) {
    EXPECT_EQ(e.law(), Law::kWindowScaling);
    EXPECT_NE(std::string(e.what()).find("window scaling"), std::string::npos);
  }
  EXPECT_THROW(fit_site_model({}), FitError);
}

TEST(FitSiteModel, RoundTripRecoversGeneratingLaws) {
  const auto s = reference_scenario(1);
  const auto windows = analyze(s);
  SiteModelConfig cfg;
  cfg.site_label = "synthetic";
  const auto fits = fit_site_laws(windows, cfg);
  const auto p = assemble_parameters(fits, windows, cfg);

  EXPECT_NEAR(p.lambda, s.zm_lambda, 0.1);
  EXPECT_NEAR(p.delta, s.zm_delta, 0.3);
  const double t_half = std::pow(s.cauchy_beta, 1.0 / s.cauchy_alpha);
  EXPECT_NEAR(p.t_half(), t_half, 0.2 * t_half);
  EXPECT_GE(p.gamma, 0.0);
  EXPECT_LE(p.gamma, 1.0);

  // Scaling exponent against the hypergeometric expectation of the same
  // windows, fitted by ordinary least squares in log-log space.
  std::vector<double> xs;
  std::vector<double> ys;
  StreamGenerator gen(s);
  while (auto w = gen.next()) {
    std::vector<Count> d;
    for (const auto& e : gen.last_emissions()) d.push_back(e.packets);
    for (int k = 0; k < cfg.scaling_octaves; ++k) {
      // One point per sub-window, as the estimator sees them.
      const Count m = s.n_valid >> k;
      const double y = std::log(expected_unique(d, s.n_valid, m));
      for (int rep = 0; rep < (1 << k); ++rep) {
        xs.push_back(std::log(static_cast<double>(m)));
        ys.push_back(y);
      }
    }
  }
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double oracle_gamma = sxy / sxx;
  EXPECT_NEAR(p.gamma, oracle_gamma, 0.01);

  EXPECT_EQ(p.site_label, "synthetic");
  EXPECT_EQ(p.provenance.windows, s.n_windows);
  EXPECT_EQ(p.provenance.n_valid, s.n_valid);
  EXPECT_EQ(p.provenance.zipf_mandelbrot.quantity, "source_packets");
  EXPECT_EQ(p.provenance.window_scaling.quantity, "unique_sources");
  EXPECT_EQ(p.provenance.zipf_mandelbrot.residual, fits.zipf_mandelbrot.residual);
  EXPECT_NO_THROW(p.validate());
}

TEST(FitSiteModel, DisjointHalvesAgreeWithinStandardErrors) {
  SyntheticScenario s = reference_scenario(2);
  s.n_valid = 1 << 18;
  s.n_windows = 64;
  s.n_sources = 8'000'000;
  const auto windows = analyze(s);
  const std::span<const WindowAnalysis> all(windows);
  const auto a = fit_site_model(all.first(32));
  const auto b = fit_site_model(all.last(32));

  auto agree = [](const char* name, double x, double sx, double y, double sy) {
    EXPECT_LE(std::abs(x - y), 2 * std::sqrt(sx * sx + sy * sy))
        << name << ": " << x << " +- " << sx << " vs " << y << " +- " << sy;
  };
  const auto& pa = a.provenance;
  const auto& pb = b.provenance;
  agree("gamma", a.gamma, pa.gamma_stderr, b.gamma, pb.gamma_stderr);
  agree("delta", a.delta, pa.delta_stderr, b.delta, pb.delta_stderr);
  agree("lambda", a.lambda, pa.lambda_stderr, b.lambda, pb.lambda_stderr);
  agree("alpha", a.alpha, pa.alpha_stderr, b.alpha, pb.alpha_stderr);
  agree("beta", a.beta, pa.beta_stderr, b.beta, pb.beta_stderr);
}

TEST(FitSiteModel, AnonymizationDoesNotChangeAnyFit) {
  SyntheticScenario s;
  s.n_valid = 1 << 14;
  s.n_windows = 10;
  s.zm_d_max = 500;
  s.n_sources = 1'000'000;
  s.seed = 8;
  AnonymizationKey key{};
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(7 * i + 1);
  Anonymizer anon(key);

  const auto plain = analyze(s);
  const auto hidden = analyze(s, {}, &anon);
  const auto f1 = fit_site_laws(plain);
  const auto f2 = fit_site_laws(hidden);
  EXPECT_EQ(f1.histogram, f2.histogram);
  EXPECT_EQ(f1.self_correlation, f2.self_correlation);
  EXPECT_EQ(f1.scaling.gamma, f2.scaling.gamma);
  EXPECT_EQ(f1.scaling.coefficient, f2.scaling.coefficient);
  EXPECT_EQ(f1.zipf_mandelbrot.delta, f2.zipf_mandelbrot.delta);
  EXPECT_EQ(f1.zipf_mandelbrot.lambda, f2.zipf_mandelbrot.lambda);
  EXPECT_EQ(f1.cauchy.alpha, f2.cauchy.alpha);
  EXPECT_EQ(f1.cauchy.beta, f2.cauchy.beta);
  EXPECT_EQ(fit_site_model(plain), fit_site_model(plain));
}

TEST(FitSiteModel, ConfigurableBindings) {
  SyntheticScenario s;
  s.n_valid = 1 << 14;
  s.n_windows = 6;
  s.zm_d_max = 500;
  s.n_sources = 1'000'000;
  SiteModelConfig cfg;
  cfg.scaling_quantity = Aggregate::kUniqueDestinations;
  cfg.zm_quantity = DegreeQuantity::kSourceFanout;
  cfg.max_lag = 100;
  const auto windows = analyze(s, cfg);
  const auto fits = fit_site_laws(windows, cfg);
  EXPECT_EQ(fits.scaling.quantity, "unique_destinations");
  EXPECT_EQ(fits.self_correlation.points.size(), s.n_windows);
  const auto p = assemble_parameters(fits, windows, cfg);
  EXPECT_EQ(p.provenance.zipf_mandelbrot.quantity, "source_fanout");
}

}  // namespace
}  // namespace tlns
