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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tlns/address.hpp"
#include "tlns/ingest.hpp"

namespace tlns {

using Engine = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Unbiased integer in [0, n). n must be positive.
std::uint64_t uniform_below(Engine& eng, std::uint64_t n);

/// Mixes a 64-bit value (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Truncated Zipf-Mandelbrot law p(d) proportional to 1/(d+delta)^lambda on
/// [1, d_max], sampled by inverse CDF over the normalized mass table.
class ZipfMandelbrotSampler {
 public:
  /// Throws DomainError unless delta > -1, lambda > 0 and d_max >= 1.
  ZipfMandelbrotSampler(double delta, double lambda, Count d_max);

  Count sample(Engine& eng) const { return from_uniform(uniform01(eng)); }
  /// Degree for a uniform variate u in [0, 1).
  Count from_uniform(double u) const;
  double probability(Count d) const;
  Count d_max() const noexcept { return static_cast<Count>(cdf_.size()); }

 private:
  std::vector<double> cdf_;  // cdf_[d-1] = P(D <= d)
};

/// One draw; builds the mass table on every call. Use ZipfMandelbrotSampler
/// for repeated draws.
Count sample_zipf_mandelbrot(double delta, double lambda, Count d_max, Engine& eng);

enum class ObserverRule { kNone, kModelVisibility };

struct SyntheticScenario {
  /// Most distinct sources the stream may use.
  std::uint64_t n_sources = 1'000'000;
  double zm_delta = 1.0;
  double zm_lambda = 2.0;
  Count zm_d_max = 10'000;
  double cauchy_alpha = 0.8;
  double cauchy_beta = 10.0;
  std::uint64_t n_windows = 8;
  Count n_valid = 1 << 16;
  std::uint64_t seed = 1;
  ObserverRule observer_b_rule = ObserverRule::kNone;
  std::uint64_t dest_pool = 1 << 16;
  double dest_delta = 0.0;
  double dest_lambda = 1.0;
  Timestamp start_us = 1'700'000'000'000'000ULL;

  /// Throws DomainError on a non-positive count or out-of-range law
  /// parameter. Revisit dynamics need 0 < alpha <= 1.
  void validate() const;
};

/// Realized fill statistics of one generated window.
struct WindowFill {
  std::uint64_t index = 0;
  std::uint64_t sources = 0;
  std::uint64_t arrivals = 0;
  Count truncated = 0;  // packets cut from the last arrival
  Count trimmed = 0;    // packets removed uniformly from survivors
};

struct GenerationReport {
  std::vector<WindowFill> windows;
  std::uint64_t sources_used = 0;
  Count packets = 0;
};

/// One source's share of a window.
struct SourceEmission {
  std::uint64_t source = 0;  // population index
  Count packets = 0;
};

/// Source id for a population index (a bijection on 32-bit ids).
Address source_address(std::uint64_t index) noexcept;
/// Destination id for a popularity rank in [1, pool].
Address destination_address(std::uint64_t rank) noexcept;

/// Window-by-window presence and packet counts.
///
/// Sources are active over one contiguous run of windows. Sources active in
/// the first window get a residual lifetime R with P(R > t) = C(t); later
/// arrivals get a lifetime L with P(L >= j) = (C(j-1) - C(j)) / (1 - C(1)),
/// where C(t) = beta / (beta + t^alpha). Both keep the fraction of a window's
/// sources still present t windows later at C(t) in expectation. Arrivals
/// join until the window holds exactly n_valid packets.
class PresenceEngine {
 public:
  explicit PresenceEngine(const SyntheticScenario& s);
  ~PresenceEngine();
  PresenceEngine(PresenceEngine&&) noexcept;
  PresenceEngine& operator=(PresenceEngine&&) noexcept;

  /// Emissions of the next window, ordered by source index.
  std::vector<SourceEmission> next(WindowFill& fill);
  std::uint64_t sources_used() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Lazily produces the packet windows of a scenario.
class StreamGenerator {
 public:
  /// Validates the scenario and checks that n_sources suffices; throws
  /// InfeasibleScenario carrying the required population otherwise.
  explicit StreamGenerator(const SyntheticScenario& s);

  std::optional<Window> next();
  const GenerationReport& report() const noexcept { return report_; }
  /// Per-source packet counts of the last window returned.
  std::span<const SourceEmission> last_emissions() const noexcept { return emissions_; }

 private:
  SyntheticScenario scenario_;
  PresenceEngine presence_;
  std::vector<SourceEmission> emissions_;
  GenerationReport report_;
  std::uint64_t window_ = 0;
  ZipfMandelbrotSampler dest_;
};

/// Population needed to realize the scenario, ignoring n_sources.
std::uint64_t required_sources(const SyntheticScenario& s);

/// Writes the scenario as CSV with a header row. Returns the fill report.
GenerationReport generate_stream(const SyntheticScenario& s, std::ostream& csv);

/// Writes `<stem>.csv` and its ground-truth sidecar; returns the sidecar path.
std::filesystem::path generate_stream(const SyntheticScenario& s,
                                      const std::filesystem::path& csv_path);

/// Observer B keeps each A source of a window with probability
/// min(1, log2 d / log2 sqrt(n_valid)), d being its packet count in that
/// window; its records fall inside the A window's time span.
struct TwoObserverStreams {
  std::vector<PacketRecord> a;
  std::vector<PacketRecord> b;
  GenerationReport report;
};

TwoObserverStreams generate_two_observers(const SyntheticScenario& s);

struct TwoObserverFiles {
  std::filesystem::path a;
  std::filesystem::path b;
  std::filesystem::path sidecar;
};

TwoObserverFiles generate_two_observers(const SyntheticScenario& s,
                                        const std::filesystem::path& a_path,
                                        const std::filesystem::path& b_path);

/// Source sets of a bare presence process with a fixed population: every
/// window holds `population` sources in expectation, with
/// population * (1 - C(1)) arrivals per window.
std::vector<std::vector<Address>> simulate_presence(double alpha, double beta,
                                                    std::uint64_t population,
                                                    std::uint64_t n_windows, std::uint64_t seed);

}  // namespace tlns
