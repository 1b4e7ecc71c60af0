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
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tlns/address.hpp"
#include "tlns/ingest.hpp"

namespace tlns {

struct MatrixEntry {
  Address src = 0;
  Address dst = 0;
  Count count = 0;
  Link link() const noexcept { return {src, dst}; }
  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

struct MatrixMeta {
  std::uint64_t window_index = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  /// N_V of the window the matrix came from. Equals n_valid() for a freshly
  /// built matrix; subrange results keep the parent value here.
  Count parent_n_valid = 0;
  friend bool operator==(const MatrixMeta&, const MatrixMeta&) = default;
};

/// Hypersparse source x destination packet-count matrix for one window.
///
/// Entries are sorted by (src, dst), unique, and strictly positive. Memory is
/// proportional to the number of stored entries. Immutable once built.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;

  /// Validates and sorts `entries`. Throws DomainError on a zero count or a
  /// duplicated (src, dst) pair.
  static TrafficMatrix from_entries(std::vector<MatrixEntry> entries, MatrixMeta meta);

  std::span<const MatrixEntry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Sum of all stored counts.
  Count n_valid() const noexcept { return total_; }
  const MatrixMeta& meta() const noexcept { return meta_; }

  /// Count at (src, dst); 0 when absent.
  Count at(Address src, Address dst) const noexcept;

  friend bool operator==(const TrafficMatrix&, const TrafficMatrix&) = default;

 private:
  friend class MatrixBuilder;
  friend TrafficMatrix build_matrix(std::span<const PacketRecord> records, MatrixMeta meta);
  std::vector<MatrixEntry> entries_;
  Count total_ = 0;
  MatrixMeta meta_;
};

/// Single-owner accumulator; `finalize` sorts into a TrafficMatrix.
class MatrixBuilder {
 public:
  explicit MatrixBuilder(std::size_t expected_links = 0);
  void add(Address src, Address dst, Count count = 1);
  TrafficMatrix finalize(MatrixMeta meta) &&;

 private:
  std::unordered_map<Link, Count, LinkHash> acc_;
  Count total_ = 0;
};

TrafficMatrix build_matrix(const Window& window);
TrafficMatrix build_matrix(std::span<const PacketRecord> records, MatrixMeta meta);

/// Diagonal support of a subrange mask: a set of identifiers.
class RangeMask {
 public:
  RangeMask() = default;
  explicit RangeMask(std::vector<Address> members);
  bool contains(Address a) const noexcept;
  std::size_t size() const noexcept { return members_.size(); }
  std::span<const Address> members() const noexcept { return members_; }

 private:
  std::vector<Address> members_;  // sorted, unique
};

/// Entries with both endpoints in `mask`. Result n_valid() is the retained
/// packet total; meta().parent_n_valid keeps the original window size.
TrafficMatrix subrange_include(const TrafficMatrix& m, const RangeMask& mask);

/// Entries of `m` not retained by subrange_include.
TrafficMatrix subrange_exclude(const TrafficMatrix& m, const RangeMask& mask);

// ---------------------------------------------------------------------------
// Aggregates

enum class Aggregate {
  kValidPackets,
  kUniqueLinks,
  kMaxLinkPackets,
  kUniqueSources,
  kMaxSourcePackets,
  kMaxSourceFanout,
  kUniqueDestinations,
  kMaxDestPackets,
  kMaxDestFanin,
};

inline constexpr Aggregate kAllAggregates[] = {
    Aggregate::kValidPackets,       Aggregate::kUniqueLinks,      Aggregate::kMaxLinkPackets,
    Aggregate::kUniqueSources,      Aggregate::kMaxSourcePackets, Aggregate::kMaxSourceFanout,
    Aggregate::kUniqueDestinations, Aggregate::kMaxDestPackets,   Aggregate::kMaxDestFanin,
};

const char* aggregate_name(Aggregate a) noexcept;
Aggregate parse_aggregate(std::string_view name);

struct NetworkAggregates {
  Count valid_packets = 0;
  Count unique_links = 0;
  Count max_link_packets = 0;
  Count unique_sources = 0;
  Count max_source_packets = 0;
  Count max_source_fanout = 0;
  Count unique_destinations = 0;
  Count max_dest_packets = 0;
  Count max_dest_fanin = 0;

  Count get(Aggregate a) const noexcept;
  friend bool operator==(const NetworkAggregates&, const NetworkAggregates&) = default;
};

NetworkAggregates aggregates(const TrafficMatrix& m);

template <typename K>
using CountMap = std::vector<std::pair<K, Count>>;  // sorted by key

/// Row/column reductions of a traffic matrix.
struct DegreeVectors {
  CountMap<Address> source_packets;
  CountMap<Address> source_fanout;
  CountMap<Address> dest_packets;
  CountMap<Address> dest_fanin;
  CountMap<Link> link_packets;
};

DegreeVectors degree_vectors(const TrafficMatrix& m);

/// The five per-entity quantities whose distributions are studied.
enum class DegreeQuantity { kSourcePackets, kSourceFanout, kLinkPackets, kDestFanin, kDestPackets };

inline constexpr DegreeQuantity kAllDegreeQuantities[] = {
    DegreeQuantity::kSourcePackets, DegreeQuantity::kSourceFanout, DegreeQuantity::kLinkPackets,
    DegreeQuantity::kDestFanin, DegreeQuantity::kDestPackets};

const char* degree_quantity_name(DegreeQuantity q) noexcept;
DegreeQuantity parse_degree_quantity(std::string_view name);

/// Values of one quantity, in key order.
std::vector<Count> degree_values(const DegreeVectors& v, DegreeQuantity q);

/// Distinct source ids of a matrix, sorted.
std::vector<Address> source_set(const TrafficMatrix& m);

}  // namespace tlns
