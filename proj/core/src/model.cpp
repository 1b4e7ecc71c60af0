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

#include "tlns/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlns/error.hpp"

namespace tlns {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

double visibility(double d, Count n_valid) {
  return std::log2(d) / (0.5 * std::log2(static_cast<double>(n_valid)));
}

}  // namespace

void ModelParameters::validate() const {
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(delta > ZipfMandelbrotFit::kDeltaMin && delta <= ZipfMandelbrotFit::kDeltaMax,
          "delta must lie in (-1, 10]");
  require(lambda > 0 && lambda <= ZipfMandelbrotFit::kLambdaMax, "lambda must lie in (0, 6]");
  require(alpha > 0 && alpha <= CauchyFit::kAlphaMax, "alpha must lie in (0, 2]");
  require(beta > 0 && beta <= CauchyFit::kBetaMax, "beta must lie in (0, 1e6]");
}

ObservabilityScore observability_score(const ModelParameters& p, const ObservabilityQuery& q) {
  require(q.n_valid >= 4, "n_valid must be >= 4");
  require(q.d >= 1, "d must be >= 1");
  require(q.t >= 0, "t must be >= 0");
  const double d = static_cast<double>(q.d);
  require(d + p.delta > 0, "d + delta must be positive");
  require(p.alpha > 0 && p.beta > 0, "alpha and beta must be positive");

  const double n = static_cast<double>(q.n_valid);
  ObservabilityScore s;
  s.factors.window = std::exp2(p.gamma * std::log2(n));
  s.factors.intensity = 1.0 / std::pow(d + p.delta, p.lambda);
  s.factors.revisit = revisit_probability(p.alpha, p.beta, q.t);
  s.factors.visibility = visibility(d, q.n_valid);
  s.zero_visibility = q.d == 1;
  s.raw = s.factors.window * s.factors.intensity * s.factors.revisit * s.factors.visibility;

  const double root = std::sqrt(n);
  require(root + p.delta > 0, "sqrt(n_valid) + delta must be positive");
  s.reference = s.factors.window / std::pow(root + p.delta, p.lambda);
  s.normalized = s.raw / s.reference;
  s.probability = std::min(1.0, s.normalized);
  return s;
}

double expected_quantity(const ScalingFit& f, Count n_valid) {
  require(n_valid >= 1, "n_valid must be >= 1");
  return f.coefficient * std::exp2(f.gamma * std::log2(static_cast<double>(n_valid)));
}

double revisit_probability(double alpha, double beta, double t) {
  require(t >= 0, "lag must be >= 0");
  if (t == 0) return 1.0;
  return beta / (beta + std::pow(t, alpha));
}

double revisit_probability(const CauchyFit& c, double t) {
  return revisit_probability(c.alpha, c.beta, t);
}

double second_observer_probability(Count d, Count n_valid) {
  require(d >= 1, "d must be >= 1");
  require(n_valid >= 4, "n_valid must be >= 4");
  const unsigned __int128 square = static_cast<unsigned __int128>(d) * d;
  if (square >= n_valid) return 1.0;
  return std::min(1.0, visibility(static_cast<double>(d), n_valid));
}

}  // namespace tlns
