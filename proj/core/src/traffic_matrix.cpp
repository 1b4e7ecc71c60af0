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

#include "tlns/traffic_matrix.hpp"

#include <algorithm>
#include <string>

#include "tlns/error.hpp"

namespace tlns {

TrafficMatrix TrafficMatrix::from_entries(std::vector<MatrixEntry> entries, MatrixMeta meta) {
  std::sort(entries.begin(), entries.end(),
            [](const MatrixEntry& a, const MatrixEntry& b) { return a.link() < b.link(); });
  TrafficMatrix m;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].count == 0) {
      throw DomainError("explicit zero at (" + to_string(entries[i].src) + ", " +
                        to_string(entries[i].dst) + ")");
    }
    if (i > 0 && entries[i].link() == entries[i - 1].link()) {
      throw DomainError("duplicate entry (" + to_string(entries[i].src) + ", " +
                        to_string(entries[i].dst) + ")");
    }
    m.total_ += entries[i].count;
  }
  m.entries_ = std::move(entries);
  m.meta_ = meta;
  return m;
}

Count TrafficMatrix::at(Address src, Address dst) const noexcept {
  const Link key{src, dst};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const MatrixEntry& e, const Link& k) { return e.link() < k; });
  return it != entries_.end() && it->link() == key ? it->count : 0;
}

MatrixBuilder::MatrixBuilder(std::size_t expected_links) { acc_.reserve(expected_links); }

void MatrixBuilder::add(Address src, Address dst, Count count) {
  acc_[Link{src, dst}] += count;
  total_ += count;
}

TrafficMatrix MatrixBuilder::finalize(MatrixMeta meta) && {
  TrafficMatrix m;
  m.entries_.reserve(acc_.size());
  for (const auto& [link, count] : acc_) {
    if (count > 0) m.entries_.push_back({link.src, link.dst, count});
  }
  std::sort(m.entries_.begin(), m.entries_.end(),
            [](const MatrixEntry& a, const MatrixEntry& b) { return a.link() < b.link(); });
  m.total_ = total_;
  m.meta_ = meta;
  acc_.clear();
  return m;
}

TrafficMatrix build_matrix(std::span<const PacketRecord> records, MatrixMeta meta) {
  // Sort-and-merge beats hashing 128-bit pairs for whole windows.
  std::vector<Link> links;
  links.reserve(records.size());
  for (const auto& r : records) links.push_back({r.src, r.dst});
  std::sort(links.begin(), links.end());

  TrafficMatrix m;
  m.entries_.reserve(links.size() / 2 + 1);
  for (std::size_t i = 0; i < links.size();) {
    std::size_t j = i + 1;
    while (j < links.size() && links[j] == links[i]) ++j;
    m.entries_.push_back({links[i].src, links[i].dst, static_cast<Count>(j - i)});
    i = j;
  }
  m.total_ = records.size();
  m.meta_ = meta;
  return m;
}

TrafficMatrix build_matrix(const Window& window) {
  MatrixMeta meta{window.index, window.start, window.end, window.records.size()};
  return build_matrix(window.records, meta);
}

RangeMask::RangeMask(std::vector<Address> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool RangeMask::contains(Address a) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), a);
}

namespace {

template <typename Keep>
TrafficMatrix select_entries(const TrafficMatrix& m, Keep keep) {
  std::vector<MatrixEntry> kept;
  for (const auto& e : m.entries()) {
    if (keep(e)) kept.push_back(e);
  }
  // Input is already sorted and unique, so this only recomputes the total.
  return TrafficMatrix::from_entries(std::move(kept), m.meta());
}

}  // namespace

TrafficMatrix subrange_include(const TrafficMatrix& m, const RangeMask& mask) {
  return select_entries(m, [&](const MatrixEntry& e) {
    return mask.contains(e.src) && mask.contains(e.dst);
  });
}

TrafficMatrix subrange_exclude(const TrafficMatrix& m, const RangeMask& mask) {
  return select_entries(m, [&](const MatrixEntry& e) {
    return !(mask.contains(e.src) && mask.contains(e.dst));
  });
}

// ---------------------------------------------------------------------------

namespace {

struct AggregateInfo {
  Aggregate id;
  const char* name;
  Count NetworkAggregates::*field;
};

constexpr AggregateInfo kAggregateInfo[] = {
    {Aggregate::kValidPackets, "valid_packets", &NetworkAggregates::valid_packets},
    {Aggregate::kUniqueLinks, "unique_links", &NetworkAggregates::unique_links},
    {Aggregate::kMaxLinkPackets, "max_link_packets", &NetworkAggregates::max_link_packets},
    {Aggregate::kUniqueSources, "unique_sources", &NetworkAggregates::unique_sources},
    {Aggregate::kMaxSourcePackets, "max_source_packets", &NetworkAggregates::max_source_packets},
    {Aggregate::kMaxSourceFanout, "max_source_fanout", &NetworkAggregates::max_source_fanout},
    {Aggregate::kUniqueDestinations, "unique_destinations",
     &NetworkAggregates::unique_destinations},
    {Aggregate::kMaxDestPackets, "max_dest_packets", &NetworkAggregates::max_dest_packets},
    {Aggregate::kMaxDestFanin, "max_dest_fanin", &NetworkAggregates::max_dest_fanin},
};

const AggregateInfo& info(Aggregate a) {
  return kAggregateInfo[static_cast<std::size_t>(a)];
}

}  // namespace

const char* aggregate_name(Aggregate a) noexcept { return info(a).name; }

Aggregate parse_aggregate(std::string_view name) {
  for (const auto& i : kAggregateInfo) {
    if (name == i.name) return i.id;
  }
  throw DomainError("unknown aggregate '" + std::string(name) + "'");
}

Count NetworkAggregates::get(Aggregate a) const noexcept { return this->*info(a).field; }

NetworkAggregates aggregates(const TrafficMatrix& m) {
  NetworkAggregates agg;
  agg.valid_packets = m.n_valid();
  agg.unique_links = m.nnz();

  // Rows are contiguous because entries are sorted by src.
  const auto entries = m.entries();
  std::size_t i = 0;
  while (i < entries.size()) {
    const Address src = entries[i].src;
    Count packets = 0;
    Count fanout = 0;
    for (; i < entries.size() && entries[i].src == src; ++i) {
      packets += entries[i].count;
      ++fanout;
      agg.max_link_packets = std::max(agg.max_link_packets, entries[i].count);
    }
    ++agg.unique_sources;
    agg.max_source_packets = std::max(agg.max_source_packets, packets);
    agg.max_source_fanout = std::max(agg.max_source_fanout, fanout);
  }

  std::unordered_map<Address, std::pair<Count, Count>, AddressHash> cols;
  cols.reserve(entries.size());
  for (const auto& e : entries) {
    auto& c = cols[e.dst];
    c.first += e.count;
    c.second += 1;
  }
  agg.unique_destinations = cols.size();
  for (const auto& [dst, c] : cols) {
    agg.max_dest_packets = std::max(agg.max_dest_packets, c.first);
    agg.max_dest_fanin = std::max(agg.max_dest_fanin, c.second);
  }
  return agg;
}

DegreeVectors degree_vectors(const TrafficMatrix& m) {
  DegreeVectors v;
  const auto entries = m.entries();
  v.link_packets.reserve(entries.size());
  std::size_t i = 0;
  while (i < entries.size()) {
    const Address src = entries[i].src;
    Count packets = 0;
    Count fanout = 0;
    for (; i < entries.size() && entries[i].src == src; ++i) {
      packets += entries[i].count;
      ++fanout;
      v.link_packets.emplace_back(entries[i].link(), entries[i].count);
    }
    v.source_packets.emplace_back(src, packets);
    v.source_fanout.emplace_back(src, fanout);
  }

  std::vector<std::pair<Address, Count>> by_dst;
  by_dst.reserve(entries.size());
  for (const auto& e : entries) by_dst.emplace_back(e.dst, e.count);
  std::sort(by_dst.begin(), by_dst.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  i = 0;
  while (i < by_dst.size()) {
    const Address dst = by_dst[i].first;
    Count packets = 0;
    Count fanin = 0;
    for (; i < by_dst.size() && by_dst[i].first == dst; ++i) {
      packets += by_dst[i].second;
      ++fanin;
    }
    v.dest_packets.emplace_back(dst, packets);
    v.dest_fanin.emplace_back(dst, fanin);
  }
  return v;
}

namespace {

constexpr const char* kDegreeNames[] = {"source_packets", "source_fanout", "link_packets",
                                        "dest_fanin", "dest_packets"};

template <typename K>
std::vector<Count> values_of(const CountMap<K>& map) {
  std::vector<Count> out;
  out.reserve(map.size());
  for (const auto& kv : map) out.push_back(kv.second);
  return out;
}

}  // namespace

const char* degree_quantity_name(DegreeQuantity q) noexcept {
  return kDegreeNames[static_cast<std::size_t>(q)];
}

DegreeQuantity parse_degree_quantity(std::string_view name) {
  for (auto q : kAllDegreeQuantities) {
    if (name == degree_quantity_name(q)) return q;
  }
  throw DomainError("unknown degree quantity '" + std::string(name) + "'");
}

std::vector<Count> degree_values(const DegreeVectors& v, DegreeQuantity q) {
  switch (q) {
    case DegreeQuantity::kSourcePackets:
      return values_of(v.source_packets);
    case DegreeQuantity::kSourceFanout:
      return values_of(v.source_fanout);
    case DegreeQuantity::kLinkPackets:
      return values_of(v.link_packets);
    case DegreeQuantity::kDestFanin:
      return values_of(v.dest_fanin);
    case DegreeQuantity::kDestPackets:
      return values_of(v.dest_packets);
  }
  return {};
}

std::vector<Address> source_set(const TrafficMatrix& m) {
  std::vector<Address> out;
  for (const auto& e : m.entries()) {
    if (out.empty() || out.back() != e.src) out.push_back(e.src);
  }
  return out;
}

}  // namespace tlns
