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
#include <span>
#include <utility>
#include <vector>

#include "tlns/address.hpp"
#include "tlns/traffic_matrix.hpp"

namespace tlns {

/// One histogram bin over the inclusive degree range [lo, hi]. Exact bins
/// have lo == hi.
struct HistogramBin {
  Count lo = 0;
  Count hi = 0;
  Count count = 0;

  double width() const noexcept { return static_cast<double>(hi - lo + 1); }
  /// Geometric center for logarithmic bins, the degree itself otherwise.
  double center() const noexcept {
    return lo == hi ? static_cast<double>(lo)
                    : std::sqrt(static_cast<double>(lo) * static_cast<double>(hi));
  }
  double sigma() const noexcept { return std::sqrt(static_cast<double>(count)); }
  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Degree value -> number of entities having that degree.
///
/// One bin per integer degree up to kExactLimit; beyond that, bins double in
/// width: (L*2^k, L*2^(k+1)].
struct DegreeHistogram {
  static constexpr Count kExactLimit = 1'000'000;

  std::vector<HistogramBin> bins;  // ascending, non-empty
  Count total = 0;

  /// Measured per-degree probability of a bin: count / (total * width).
  double probability(const HistogramBin& b) const noexcept {
    return static_cast<double>(b.count) / (static_cast<double>(total) * b.width());
  }
  Count count_of(Count degree) const noexcept;
  friend bool operator==(const DegreeHistogram&, const DegreeHistogram&) = default;
};

/// Throws DomainError("empty histogram") for empty input and on a zero degree.
DegreeHistogram histogram(std::span<const Count> values);

/// Adds another tally (same binning rule) into `into`.
void merge_into(DegreeHistogram& into, const DegreeHistogram& other);

struct CorrelationPoint {
  double x = 0;            // lag, or log2 bucket for cross-correlation
  double probability = 0;  // in [0, 1]
  Count n = 0;             // binomial sample size
  Count windows = 0;       // reference windows contributing

  double sigma() const noexcept {
    return n == 0 ? 0.0 : std::sqrt(probability * (1 - probability) / static_cast<double>(n));
  }
  friend bool operator==(const CorrelationPoint&, const CorrelationPoint&) = default;
};

struct CorrelationCurve {
  std::vector<CorrelationPoint> points;  // x strictly increasing
  std::vector<std::uint64_t> skipped_windows;
  friend bool operator==(const CorrelationCurve&, const CorrelationCurve&) = default;
};

/// Probability of seeing a source again `t` windows later.
///
/// For lag t >= 1 the value is the mean over reference windows w of
/// |S_w ∩ S_{w+t}| / |S_w|; lag 0 is exactly 1. Empty reference windows are
/// skipped and listed. The sample size at a lag is the mean reference-window
/// size: reference windows overlap heavily in their sources, so the per-window
/// binomial variance bounds the variance of the mean.
///
/// Throws DomainError for fewer than 2 windows, max_lag >= window count, or
/// when every reference window is empty.
CorrelationCurve self_correlation(std::span<const std::vector<Address>> window_source_sets,
                                  std::size_t max_lag);

struct ObservedWindow {
  std::uint64_t window = 0;
  CountMap<Address> source_packets;  // observer A: src -> d
};

struct SeenWindow {
  std::uint64_t window = 0;
  std::vector<Address> sources;  // observer B
};

struct CrossBucket {
  int bucket = 0;  // floor(log2 d)
  Count d_lo = 0;
  Count d_hi = 0;
  Count n = 0;
  Count hits = 0;
  double probability = 0;
  /// Mean of min(1, log2 d / log2 sqrt(N_V)) over the bucket's members.
  double model = 0;

  double sigma() const noexcept {
    return n == 0 ? 0.0 : std::sqrt(probability * (1 - probability) / static_cast<double>(n));
  }
  double model_sigma() const noexcept {
    return n == 0 ? 0.0 : std::sqrt(model * (1 - model) / static_cast<double>(n));
  }
};

struct CrossCorrelation {
  std::vector<CrossBucket> buckets;  // ascending bucket, only non-empty
  std::size_t aligned_windows = 0;
  CorrelationCurve curve() const;
};

/// Fraction of observer-A sources, grouped by power-of-two packet-count
/// bucket, that observer B also saw in the aligned window. Windows are
/// matched by index. Throws DomainError when no window index is shared.
CrossCorrelation cross_correlation(std::span<const ObservedWindow> observer_a,
                                   std::span<const SeenWindow> observer_b, Count n_valid);

}  // namespace tlns
