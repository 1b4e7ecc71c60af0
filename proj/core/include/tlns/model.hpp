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
#include <string>

#include "tlns/address.hpp"
#include "tlns/fitting.hpp"

namespace tlns {

/// Residual and sample size behind one fitted law.
struct LawProvenance {
  std::string quantity;
  double residual = 0;
  std::uint64_t samples = 0;
  friend bool operator==(const LawProvenance&, const LawProvenance&) = default;
};

struct ModelProvenance {
  LawProvenance window_scaling;
  LawProvenance zipf_mandelbrot;
  LawProvenance modified_cauchy;
  double gamma_stderr = 0;
  double delta_stderr = 0;
  double lambda_stderr = 0;
  double alpha_stderr = 0;
  double beta_stderr = 0;
  double coefficient = 0;  // window-scaling prefactor
  double scale = 0;        // Zipf-Mandelbrot prefactor
  bool gamma_clamped = false;
  Count n_valid = 0;
  std::uint64_t windows = 0;
  friend bool operator==(const ModelProvenance&, const ModelProvenance&) = default;
};

/// Per-site parameters of the source observability model.
struct ModelParameters {
  double gamma = 0;
  double delta = 0;
  double lambda = 0;
  double alpha = 1;
  double beta = 1;
  std::string site_label;
  ModelProvenance provenance;

  double t_half() const { return std::pow(beta, 1.0 / alpha); }

  /// Throws DomainError when a parameter lies outside its fitter's bounds.
  void validate() const;

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

struct ObservabilityQuery {
  Count n_valid = 4;
  Count d = 1;
  double t = 0;  // lag in windows
};

struct ObservabilityFactors {
  double window = 0;      // N_V^gamma
  double intensity = 0;   // 1 / (d + delta)^lambda
  double revisit = 0;     // beta / (beta + t^alpha)
  double visibility = 0;  // log2(d) / log2(sqrt(N_V)), not capped
};

struct ObservabilityScore {
  ObservabilityFactors factors;
  double raw = 0;        // product of the four factors
  double reference = 0;  // raw score at d = sqrt(N_V), t = 0
  double normalized = 0; // raw / reference
  double probability = 0;
  bool zero_visibility = false;  // d == 1
};

/// Relative observability of a source, and the same value normalized against
/// the strongest-source, zero-lag query and capped at 1.
///
/// Throws DomainError when n_valid < 4, d < 1, t < 0 or d + delta <= 0.
ObservabilityScore observability_score(const ModelParameters& p, const ObservabilityQuery& q);

/// coefficient * n_valid^gamma.
double expected_quantity(const ScalingFit& f, Count n_valid);

/// beta / (beta + t^alpha). Throws DomainError for t < 0.
double revisit_probability(const CauchyFit& c, double t);
double revisit_probability(double alpha, double beta, double t);

/// min(1, log2(d) / log2(sqrt(n_valid))); exactly 1 once d^2 >= n_valid.
double second_observer_probability(Count d, Count n_valid);

}  // namespace tlns
