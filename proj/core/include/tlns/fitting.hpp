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

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "tlns/address.hpp"
#include "tlns/statistics.hpp"

namespace tlns {

/// Search controls shared by every fitter. Results are a deterministic
/// function of the inputs: fixed grids, then golden-section refinement.
struct SearchOptions {
  int grid_points = 1101;
  double tolerance = 1e-6;
  int max_iterations = 10'000;
};

struct Minimum {
  double x = 0;
  double value = 0;
  int iterations = 0;
};

/// Grid scan of [lo, hi] followed by golden-section refinement around the
/// best grid point.
Minimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                        const SearchOptions& opts = {});

// ---------------------------------------------------------------------------

struct ScalingSample {
  Count n_valid = 0;
  double value = 0;
};

/// quantity ~= coefficient * N_V^gamma.
struct ScalingFit {
  double gamma = 0;
  double coefficient = 0;
  double raw_slope = 0;  // before clamping to [0, 1]
  bool clamped = false;
  std::string quantity;
  double residual = 0;  // log-space RMSE
  double gamma_stderr = 0;
  std::size_t samples = 0;
};

/// Least-squares line in (log N_V, log value). Needs >= 3 distinct N_V
/// spanning >= 2 octaves and positive values; throws FitError otherwise.
ScalingFit fit_window_scaling(std::span<const ScalingSample> samples, std::string quantity = {});

// ---------------------------------------------------------------------------

/// p(d) ~= scale / (d + delta)^lambda.
struct ZipfMandelbrotFit {
  static constexpr double kDeltaMin = -1.0;  // exclusive
  static constexpr double kDeltaMax = 10.0;
  static constexpr double kLambdaMax = 6.0;

  double delta = 0;
  double lambda = 0;
  double scale = 0;
  double residual = 0;  // count-weighted log-space RMSE
  double delta_stderr = 0;
  double lambda_stderr = 0;
  std::size_t bins = 0;
  Count samples = 0;

  double model(double d) const { return scale / std::pow(d + delta, lambda); }
};

/// Weighted least squares of log p(d) against log of the model, weights are
/// bin counts. Needs >= 3 distinct degrees; throws FitError otherwise.
ZipfMandelbrotFit fit_zipf_mandelbrot(const DegreeHistogram& h, const SearchOptions& opts = {});

// ---------------------------------------------------------------------------

/// Revisit probability beta / (beta + t^alpha).
struct CauchyFit {
  static constexpr double kAlphaMax = 2.0;
  static constexpr double kBetaMax = 1e6;

  double alpha = 0;
  double beta = 0;
  double residual = 0;  // sample-size-weighted RMSE
  double alpha_stderr = 0;
  double beta_stderr = 0;
  double t_half_stderr = 0;
  std::size_t points = 0;

  /// Lag at which the revisit probability is one half.
  double t_half() const { return std::pow(beta, 1.0 / alpha); }
  double model(double t) const { return beta / (beta + std::pow(t, alpha)); }
};

/// Weighted least squares over curve points with lag >= 1, weights are the
/// sample sizes. Needs >= 3 such points; throws FitError otherwise.
CauchyFit fit_modified_cauchy(const CorrelationCurve& curve, const SearchOptions& opts = {});

}  // namespace tlns
