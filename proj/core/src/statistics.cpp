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

#include "tlns/statistics.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_map>

#include "tlns/error.hpp"
#include "tlns/model.hpp"

namespace tlns {

namespace {

// Bin index of a degree beyond the exact range: k with L*2^k < d <= L*2^(k+1).
std::pair<Count, Count> log_bin_bounds(Count d) {
  constexpr Count L = DegreeHistogram::kExactLimit;
  Count lo = L;
  while (d > lo * 2) lo *= 2;
  return {lo + 1, lo * 2};
}

std::vector<HistogramBin> bins_from_map(const std::map<Count, Count>& exact,
                                        const std::map<Count, Count>& log_lo) {
  std::vector<HistogramBin> bins;
  bins.reserve(exact.size() + log_lo.size());
  for (const auto& [d, c] : exact) bins.push_back({d, d, c});
  for (const auto& [lo, c] : log_lo) bins.push_back({lo, log_bin_bounds(lo).second, c});
  return bins;
}

}  // namespace

Count DegreeHistogram::count_of(Count degree) const noexcept {
  auto it = std::lower_bound(bins.begin(), bins.end(), degree,
                             [](const HistogramBin& b, Count d) { return b.hi < d; });
  return it != bins.end() && it->lo == degree && it->hi == degree ? it->count : 0;
}

DegreeHistogram histogram(std::span<const Count> values) {
  if (values.empty()) throw DomainError("empty histogram");
  std::vector<Count> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == 0) throw DomainError("degree 0 in histogram input");

  DegreeHistogram h;
  h.total = sorted.size();
  std::size_t i = 0;
  while (i < sorted.size()) {
    const Count d = sorted[i];
    Count lo = d;
    Count hi = d;
    if (d > DegreeHistogram::kExactLimit) std::tie(lo, hi) = log_bin_bounds(d);
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] <= hi) ++j;
    h.bins.push_back({lo, hi, static_cast<Count>(j - i)});
    i = j;
  }
  return h;
}

void merge_into(DegreeHistogram& into, const DegreeHistogram& other) {
  std::map<Count, Count> exact;
  std::map<Count, Count> logs;
  for (const DegreeHistogram* h : {static_cast<const DegreeHistogram*>(&into), &other}) {
    for (const auto& b : h->bins) (b.lo == b.hi ? exact : logs)[b.lo] += b.count;
  }
  into.bins = bins_from_map(exact, logs);
  into.total += other.total;
}

// ---------------------------------------------------------------------------

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

std::vector<std::vector<Address>> normalized_sets(
    std::span<const std::vector<Address>> sets) {
  std::vector<std::vector<Address>> out(sets.begin(), sets.end());
  for (auto& s : out) {
    if (!std::is_sorted(s.begin(), s.end())) std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

}  // namespace

CorrelationCurve self_correlation(std::span<const std::vector<Address>> window_source_sets,
                                  std::size_t max_lag) {
  const std::size_t windows = window_source_sets.size();
  if (windows < 2) throw DomainError("self correlation needs at least 2 windows");
  if (max_lag >= windows) {
    throw DomainError("max_lag " + std::to_string(max_lag) + " must be below the window count " +
                      std::to_string(windows));
  }
  const auto sets = normalized_sets(window_source_sets);

  CorrelationCurve curve;
  for (std::size_t w = 0; w < windows; ++w) {
    if (sets[w].empty()) curve.skipped_windows.push_back(w);
  }
  if (curve.skipped_windows.size() == windows) {
    throw DomainError("every reference window has an empty source set");
  }

  auto mean_size = [&](std::size_t last_ref) {
    double sum = 0;
    Count used = 0;
    for (std::size_t w = 0; w <= last_ref; ++w) {
      if (sets[w].empty()) continue;
      sum += static_cast<double>(sets[w].size());
      ++used;
    }
    return std::pair{used == 0 ? 0.0 : sum / static_cast<double>(used), used};
  };

  {
    const auto [mean, used] = mean_size(windows - 1);
    curve.points.push_back({0.0, 1.0, static_cast<Count>(std::llround(mean)), used});
  }
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double ratio_sum = 0;
    Count used = 0;
    for (std::size_t w = 0; w + lag < windows; ++w) {
      if (sets[w].empty()) continue;
      ratio_sum += static_cast<double>(intersection_size(sets[w], sets[w + lag])) /
                   static_cast<double>(sets[w].size());
      ++used;
    }
    if (used == 0) continue;
    const auto [mean, counted] = mean_size(windows - 1 - lag);
    (void)counted;
    curve.points.push_back({static_cast<double>(lag), ratio_sum / static_cast<double>(used),
                            static_cast<Count>(std::llround(mean)), used});
  }
  return curve;
}

// ---------------------------------------------------------------------------

CorrelationCurve CrossCorrelation::curve() const {
  CorrelationCurve c;
  for (const auto& b : buckets) {
    c.points.push_back({static_cast<double>(b.bucket), b.probability, b.n,
                        static_cast<Count>(aligned_windows)});
  }
  return c;
}

CrossCorrelation cross_correlation(std::span<const ObservedWindow> observer_a,
                                   std::span<const SeenWindow> observer_b, Count n_valid) {
  if (n_valid < 4) throw DomainError("cross correlation needs n_valid >= 4");
  std::unordered_map<std::uint64_t, const SeenWindow*> by_window;
  for (const auto& b : observer_b) by_window[b.window] = &b;

  struct Acc {
    Count n = 0;
    Count hits = 0;
    double model_sum = 0;
  };
  std::map<int, Acc> acc;
  CrossCorrelation out;
  std::vector<Address> seen;
  for (const auto& a : observer_a) {
    auto it = by_window.find(a.window);
    if (it == by_window.end()) continue;
    ++out.aligned_windows;
    seen = it->second->sources;
    if (!std::is_sorted(seen.begin(), seen.end())) std::sort(seen.begin(), seen.end());
    for (const auto& [src, d] : a.source_packets) {
      if (d == 0) continue;
      auto& bucket = acc[std::bit_width(d) - 1];
      ++bucket.n;
      if (std::binary_search(seen.begin(), seen.end(), src)) ++bucket.hits;
      bucket.model_sum += second_observer_probability(d, n_valid);
    }
  }
  if (out.aligned_windows == 0) throw DomainError("observers share no aligned window");

  for (const auto& [b, x] : acc) {
    CrossBucket cb;
    cb.bucket = b;
    cb.d_lo = Count{1} << b;
    cb.d_hi = b >= 63 ? ~Count{0} : (Count{1} << (b + 1)) - 1;
    cb.n = x.n;
    cb.hits = x.hits;
    cb.probability = static_cast<double>(x.hits) / static_cast<double>(x.n);
    cb.model = x.model_sum / static_cast<double>(x.n);
    out.buckets.push_back(cb);
  }
  return out;
}

}  // namespace tlns
