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

#include "tlns/fitting.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <vector>

#include "tlns/error.hpp"

namespace tlns {

Minimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                        const SearchOptions& opts) {
  const int n = std::max(opts.grid_points, 3);
  const double step = (hi - lo) / (n - 1);
  Minimum best{lo, f(lo), 0};
  int best_k = 0;
  for (int k = 1; k < n; ++k) {
    const double x = k == n - 1 ? hi : lo + step * k;
    const double v = f(x);
    if (v < best.value) {
      best = {x, v, 0};
      best_k = k;
    }
  }

  // Golden-section on the bracket around the best grid point.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = best_k == 0 ? lo : lo + step * (best_k - 1);
  double b = best_k == n - 1 ? hi : lo + step * (best_k + 1);
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > opts.tolerance && it < opts.max_iterations) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  const double x = 0.5 * (a + b);
  const double v = f(x);
  if (v <= best.value) best = {x, v, it};
  best.iterations = it;
  return best;
}

namespace {

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

// Gauss-Jordan with partial pivoting. Returns false when singular.
template <std::size_t N>
bool invert(Matrix<N>& m) {
  Matrix<N> inv{};
  for (std::size_t i = 0; i < N; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-300) return false;
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = m[col][col];
    for (std::size_t k = 0; k < N; ++k) {
      m[col][k] /= p;
      inv[col][k] /= p;
    }
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const double factor = m[r][col];
      for (std::size_t k = 0; k < N; ++k) {
        m[r][k] -= factor * m[col][k];
        inv[r][k] -= factor * inv[col][k];
      }
    }
  }
  m = inv;
  return true;
}

// Covariance s^2 (J^T W J)^-1 with s^2 = SSE / (n - N).
template <std::size_t N>
std::array<double, N> standard_errors(const std::vector<std::array<double, N>>& jac,
                                      const std::vector<double>& weights, double sse) {
  std::array<double, N> se;
  se.fill(std::numeric_limits<double>::quiet_NaN());
  if (jac.size() <= N) return se;
  Matrix<N> jtj{};
  for (std::size_t i = 0; i < jac.size(); ++i) {
    for (std::size_t r = 0; r < N; ++r) {
      for (std::size_t c = 0; c < N; ++c) jtj[r][c] += weights[i] * jac[i][r] * jac[i][c];
    }
  }
  if (!invert(jtj)) return se;
  const double s2 = sse / static_cast<double>(jac.size() - N);
  for (std::size_t k = 0; k < N; ++k) se[k] = std::sqrt(std::max(0.0, s2 * jtj[k][k]));
  return se;
}

}  // namespace

// ---------------------------------------------------------------------------

ScalingFit fit_window_scaling(std::span<const ScalingSample> samples, std::string quantity) {
  std::set<Count> sizes;
  for (const auto& s : samples) {
    if (s.n_valid == 0) throw FitError(Law::kWindowScaling, "n_valid of 0 in samples");
    if (!(s.value > 0)) {
      throw FitError(Law::kWindowScaling, "non-positive quantity value at N_V=" +
                                              std::to_string(s.n_valid));
    }
    sizes.insert(s.n_valid);
  }
  if (sizes.size() < 2) throw FitError(Law::kWindowScaling, "degenerate spread: one N_V value");
  if (sizes.size() < 3) throw FitError(Law::kWindowScaling, "need >= 3 distinct N_V values");
  if (static_cast<double>(*sizes.rbegin()) < 4.0 * static_cast<double>(*sizes.begin())) {
    throw FitError(Law::kWindowScaling, "N_V values must span at least 2 octaves");
  }

  const double n = static_cast<double>(samples.size());
  double xm = 0;
  double ym = 0;
  for (const auto& s : samples) {
    xm += std::log(static_cast<double>(s.n_valid));
    ym += std::log(s.value);
  }
  xm /= n;
  ym /= n;
  double sxx = 0;
  double sxy = 0;
  for (const auto& s : samples) {
    const double dx = std::log(static_cast<double>(s.n_valid)) - xm;
    sxx += dx * dx;
    sxy += dx * (std::log(s.value) - ym);
  }

  ScalingFit fit;
  fit.quantity = std::move(quantity);
  fit.samples = samples.size();
  fit.raw_slope = sxy / sxx;
  fit.gamma = std::clamp(fit.raw_slope, 0.0, 1.0);
  fit.clamped = fit.gamma != fit.raw_slope;
  const double intercept = ym - fit.gamma * xm;
  fit.coefficient = std::exp(intercept);

  double sse = 0;
  for (const auto& s : samples) {
    const double r =
        std::log(s.value) - (intercept + fit.gamma * std::log(static_cast<double>(s.n_valid)));
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / n);
  fit.gamma_stderr = samples.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

struct LogPoint {
  double d;  // bin center
  double y;  // log measured probability
  double w;  // bin count
};

struct ProfileResult {
  double lambda;
  double log_scale;
  double sse;
};

// For fixed delta the model is linear in (log_scale, lambda).
ProfileResult zm_profile(const std::vector<LogPoint>& pts, double delta) {
  double sw = 0;
  double xm = 0;
  double ym = 0;
  for (const auto& p : pts) {
    const double x = std::log(p.d + delta);
    sw += p.w;
    xm += p.w * x;
    ym += p.w * p.y;
  }
  xm /= sw;
  ym /= sw;
  double sxx = 0;
  double sxy = 0;
  for (const auto& p : pts) {
    const double dx = std::log(p.d + delta) - xm;
    sxx += p.w * dx * dx;
    sxy += p.w * dx * (p.y - ym);
  }
  double lambda = sxx > 0 ? -sxy / sxx : 0.0;
  lambda = std::clamp(lambda, 1e-9, ZipfMandelbrotFit::kLambdaMax);
  const double a = ym + lambda * xm;
  double sse = 0;
  for (const auto& p : pts) {
    const double r = p.y - (a - lambda * std::log(p.d + delta));
    sse += p.w * r * r;
  }
  return {lambda, a, sse};
}

}  // namespace

ZipfMandelbrotFit fit_zipf_mandelbrot(const DegreeHistogram& h, const SearchOptions& opts) {
  if (h.bins.size() < 3) {
    throw FitError(Law::kZipfMandelbrot, "underdetermined fit: " + std::to_string(h.bins.size()) +
                                             " distinct degree(s), need 3");
  }
  std::vector<LogPoint> pts;
  pts.reserve(h.bins.size());
  for (const auto& b : h.bins) {
    pts.push_back({b.center(), std::log(h.probability(b)), static_cast<double>(b.count)});
  }

  // delta > -1 is open; keep d + delta > 0 for d >= 1.
  const double lo = ZipfMandelbrotFit::kDeltaMin + 1e-3;
  const auto best = minimize_scalar([&](double delta) { return zm_profile(pts, delta).sse; }, lo,
                                    ZipfMandelbrotFit::kDeltaMax, opts);
  const ProfileResult pr = zm_profile(pts, best.x);

  ZipfMandelbrotFit fit;
  fit.delta = best.x;
  fit.lambda = pr.lambda;
  fit.scale = std::exp(pr.log_scale);
  fit.bins = pts.size();
  fit.samples = h.total;
  double sw = 0;
  for (const auto& p : pts) sw += p.w;
  fit.residual = std::sqrt(pr.sse / sw);

  std::vector<std::array<double, 3>> jac;
  std::vector<double> weights;
  for (const auto& p : pts) {
    const double u = p.d + fit.delta;
    jac.push_back({1.0, -std::log(u), -fit.lambda / u});
    weights.push_back(p.w);
  }
  const auto se = standard_errors<3>(jac, weights, pr.sse);
  fit.lambda_stderr = se[1];
  fit.delta_stderr = se[2];
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

struct CurvePoint {
  double log_t;
  double p;
  double w;
};

double cauchy_sse(const std::vector<CurvePoint>& pts, double alpha, double log_beta) {
  double sse = 0;
  for (const auto& c : pts) {
    const double m = 1.0 / (1.0 + std::exp(alpha * c.log_t - log_beta));
    const double r = c.p - m;
    sse += c.w * r * r;
  }
  return sse;
}

}  // namespace

CauchyFit fit_modified_cauchy(const CorrelationCurve& curve, const SearchOptions& opts) {
  std::vector<CurvePoint> pts;
  for (const auto& p : curve.points) {
    if (p.x >= 1.0 && p.n > 0) {
      pts.push_back({std::log(p.x), p.probability, static_cast<double>(p.n)});
    }
  }
  if (pts.size() < 3) {
    throw FitError(Law::kModifiedCauchy, "underdetermined fit: " + std::to_string(pts.size()) +
                                             " usable point(s) with lag >= 1, need 3");
  }

  const double log_beta_lo = std::log(1e-6);
  const double log_beta_hi = std::log(CauchyFit::kBetaMax);
  SearchOptions outer = opts;
  outer.grid_points = 201;
  SearchOptions inner = opts;
  inner.grid_points = 241;

  auto best_log_beta = [&](double alpha) {
    return minimize_scalar([&](double lb) { return cauchy_sse(pts, alpha, lb); }, log_beta_lo,
                           log_beta_hi, inner);
  };
  const auto a = minimize_scalar([&](double alpha) { return best_log_beta(alpha).value; }, 1e-3,
                                 CauchyFit::kAlphaMax, outer);
  const auto b = best_log_beta(a.x);

  CauchyFit fit;
  fit.alpha = a.x;
  fit.beta = std::exp(b.x);
  fit.points = pts.size();
  double sw = 0;
  for (const auto& p : pts) sw += p.w;
  fit.residual = std::sqrt(b.value / sw);

  std::vector<std::array<double, 2>> jac;
  std::vector<double> weights;
  for (const auto& c : pts) {
    const double m = 1.0 / (1.0 + std::exp(fit.alpha * c.log_t - b.x));
    const double g = m * (1 - m);
    jac.push_back({-g * c.log_t, g});
    weights.push_back(c.w);
  }
  const auto se = standard_errors<2>(jac, weights, b.value);
  fit.alpha_stderr = se[0];
  fit.beta_stderr = fit.beta * se[1];
  const double th = fit.t_half();
  const double dth_dalpha = -th * b.x / (fit.alpha * fit.alpha);
  const double dth_dlogbeta = th / fit.alpha;
  // Conservative: ignores the alpha/beta covariance.
  fit.t_half_stderr = std::sqrt(dth_dalpha * dth_dalpha * se[0] * se[0] +
                                dth_dlogbeta * dth_dlogbeta * se[1] * se[1]);
  return fit;
}

}  // namespace tlns
