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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tlns/fitting.hpp"
#include "tlns/ingest.hpp"
#include "tlns/model.hpp"
#include "tlns/traffic_matrix.hpp"

namespace tlns {

/// Which measured quantity feeds each law.
struct SiteModelConfig {
  Aggregate scaling_quantity = Aggregate::kUniqueSources;
  DegreeQuantity zm_quantity = DegreeQuantity::kSourcePackets;
  /// Window sizes N_V / 2^k for k in [0, scaling_octaves) feed the scaling fit.
  int scaling_octaves = 4;
  /// Largest self-correlation lag; clipped to windows - 1.
  std::size_t max_lag = 32;
  std::string site_label;
  SearchOptions search;
};

/// Everything the site fit needs from one window, so the raw records can be
/// released once a window has been analyzed.
struct WindowAnalysis {
  std::uint64_t index = 0;
  Count n_valid = 0;
  NetworkAggregates aggregates;
  std::vector<ScalingSample> scaling_samples;  // consecutive sub-windows
  std::vector<Count> zm_values;
  std::vector<Address> sources;  // sorted
};

WindowAnalysis analyze_window(const Window& window, const SiteModelConfig& config = {});

/// Fits the three laws and assembles them into model parameters. Sub-fit
/// failures surface as FitError tagged with the failing law.
ModelParameters fit_site_model(std::span<const WindowAnalysis> windows,
                               const SiteModelConfig& config = {});

/// The individual fits behind a ModelParameters, for reporting.
struct SiteFits {
  ScalingFit scaling;
  ZipfMandelbrotFit zipf_mandelbrot;
  CorrelationCurve self_correlation;
  CauchyFit cauchy;
  DegreeHistogram histogram;
};

SiteFits fit_site_laws(std::span<const WindowAnalysis> windows, const SiteModelConfig& config = {});

ModelParameters assemble_parameters(const SiteFits& fits, std::span<const WindowAnalysis> windows,
                                    const SiteModelConfig& config);

}  // namespace tlns
