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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tlns/ingest.hpp"
#include "tlns/traffic_matrix.hpp"

namespace tlns::testing {

inline std::filesystem::path data_dir() { return TLNS_TEST_DATA_DIR; }

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> serial{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("tlns-test-" + std::to_string(stamp) + "-" + std::to_string(serial++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Small seeded generator for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_); }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(eng_);
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  bool coin(double p = 0.5) { return unit() < p; }

  /// Full-width 128-bit identifier.
  Address wide_address() { return make_address(eng_(), eng_()); }

  /// Records over a `side` x `side` address grid with non-decreasing times.
  std::vector<PacketRecord> records(std::size_t n, std::uint64_t side, Address base = 0) {
    std::vector<PacketRecord> out(n);
    Timestamp t = 1000;
    for (auto& r : out) {
      t += below(3);
      r = {t, base + below(side), base + below(side)};
    }
    return out;
  }

  /// Heavy-tailed records: a few addresses carry most of the traffic.
  std::vector<PacketRecord> skewed_records(std::size_t n, std::uint64_t side) {
    std::vector<PacketRecord> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      double u = unit();
      double v = unit();
      auto src = static_cast<std::uint64_t>(static_cast<double>(side) * u * u * u);
      auto dst = static_cast<std::uint64_t>(static_cast<double>(side) * v * v);
      out[k] = {k, std::min(src, side - 1), std::min(dst, side - 1)};
    }
    return out;
  }

  RangeMask mask_from(const TrafficMatrix& m, double keep) {
    std::set<Address> ids;
    for (const auto& e : m.entries()) {
      if (coin(keep)) ids.insert(e.src);
      if (coin(keep)) ids.insert(e.dst);
    }
    if (coin(0.3)) ids.insert(wide_address());
    return RangeMask(std::vector<Address>(ids.begin(), ids.end()));
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// Straight tally of records into an ordered map.
inline std::map<std::pair<Address, Address>, Count> tally(const std::vector<PacketRecord>& records) {
  std::map<std::pair<Address, Address>, Count> out;
  for (const auto& r : records) ++out[{r.src, r.dst}];
  return out;
}

/// Dense reference: compacts the occupied rows and columns into a full
/// count matrix and evaluates every aggregate by explicit loops.
struct DenseOracle {
  std::vector<Address> rows;
  std::vector<Address> cols;
  std::vector<std::vector<Count>> a;

  explicit DenseOracle(const std::vector<PacketRecord>& records) {
    std::set<Address> rs;
    std::set<Address> cs;
    for (const auto& r : records) {
      rs.insert(r.src);
      cs.insert(r.dst);
    }
    rows.assign(rs.begin(), rs.end());
    cols.assign(cs.begin(), cs.end());
    a.assign(rows.size(), std::vector<Count>(cols.size(), 0));
    for (const auto& r : records) {
      auto i = std::lower_bound(rows.begin(), rows.end(), r.src) - rows.begin();
      auto j = std::lower_bound(cols.begin(), cols.end(), r.dst) - cols.begin();
      ++a[i][j];
    }
  }

  Count row_sum(std::size_t i) const {
    Count s = 0;
    for (Count v : a[i]) s += v;
    return s;
  }
  Count row_nnz(std::size_t i) const {
    Count s = 0;
    for (Count v : a[i]) s += v > 0;
    return s;
  }
  Count col_sum(std::size_t j) const {
    Count s = 0;
    for (const auto& row : a) s += row[j];
    return s;
  }
  Count col_nnz(std::size_t j) const {
    Count s = 0;
    for (const auto& row : a) s += row[j] > 0;
    return s;
  }

  NetworkAggregates aggregates() const {
    NetworkAggregates g;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        g.valid_packets += a[i][j];
        g.unique_links += a[i][j] > 0;
        g.max_link_packets = std::max(g.max_link_packets, a[i][j]);
      }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      g.unique_sources += row_sum(i) > 0;
      g.max_source_packets = std::max(g.max_source_packets, row_sum(i));
      g.max_source_fanout = std::max(g.max_source_fanout, row_nnz(i));
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      g.unique_destinations += col_sum(j) > 0;
      g.max_dest_packets = std::max(g.max_dest_packets, col_sum(j));
      g.max_dest_fanin = std::max(g.max_dest_fanin, col_nnz(j));
    }
    return g;
  }
};

template <typename K>
std::vector<Count> sorted_values(const CountMap<K>& m) {
  std::vector<Count> v;
  v.reserve(m.size());
  for (const auto& [k, c] : m) v.push_back(c);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace tlns::testing
