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
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlns/address.hpp"

namespace tlns {

/// One observed packet header event.
struct PacketRecord {
  Timestamp timestamp = 0;
  Address src = 0;
  Address dst = 0;
  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

enum class RecordFormat { kAuto, kCsv, kBinary };

RecordFormat parse_format(std::string_view name);  // "csv", "binary", "auto"

/// Inclusive interval; `low <= high` is checked by PacketFilter::validate().
template <typename T>
struct Interval {
  T low{};
  T high{};
  bool contains(T v) const noexcept { return low <= v && v <= high; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

using AddressRange = Interval<Address>;
using TimeRange = Interval<Timestamp>;

/// Validity predicate. Empty range lists accept everything on that axis.
struct PacketFilter {
  std::vector<AddressRange> src_ranges;
  std::vector<AddressRange> dst_ranges;
  std::optional<TimeRange> time_range;

  bool accepts(const PacketRecord& r) const noexcept;
  bool accepts_all() const noexcept {
    return src_ranges.empty() && dst_ranges.empty() && !time_range;
  }
  /// Throws DomainError if any interval has low > high.
  void validate() const;

  /// Parses "src=0-255,1024;dst=7;time=100-200". Throws DomainError.
  static PacketFilter parse(std::string_view spec);
};

struct WindowSpec {
  Count n_valid = 1;
};

/// Exactly `spec.n_valid` consecutive valid packets.
struct Window {
  std::uint64_t index = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  std::vector<PacketRecord> records;
};

struct StreamStats {
  std::uint64_t records_read = 0;
  std::uint64_t records_rejected = 0;  // failed the filter
  std::uint64_t windows = 0;
  std::uint64_t dropped = 0;  // trailing partial window, known once exhausted
};

// ---------------------------------------------------------------------------
// Byte sources

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  /// Reads up to `n` bytes; returns 0 only at end of input.
  virtual std::size_t read(char* dst, std::size_t n) = 0;
};

/// Opens a file, transparently decompressing when the name ends in ".gz".
std::unique_ptr<ByteSource> open_input(const std::filesystem::path& path);

/// Wraps an existing stream (not owned).
std::unique_ptr<ByteSource> stream_source(std::istream& in);

// ---------------------------------------------------------------------------
// Parsing

struct ReaderOptions {
  /// Allowed backwards step in microseconds before a record is rejected.
  std::uint64_t max_regression_us = 0;
};

/// Pull parser over CSV (`timestamp_us,src,dst`) or the binary TLNS format.
/// Records come back in file order; errors surface as ParseError at the
/// offending line (CSV) or byte offset (binary).
class RecordReader {
 public:
  RecordReader(std::unique_ptr<ByteSource> source, RecordFormat format,
               ReaderOptions options = {});
  ~RecordReader();
  RecordReader(RecordReader&&) noexcept;
  RecordReader& operator=(RecordReader&&) noexcept;

  static RecordReader open(const std::filesystem::path& path,
                           RecordFormat format = RecordFormat::kAuto,
                           ReaderOptions options = {});

  bool next(PacketRecord& out);
  std::uint64_t records_read() const noexcept;
  RecordFormat format() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<PacketRecord> read_all(RecordReader& reader);

inline constexpr char kBinaryMagic[4] = {'T', 'L', 'N', 'S'};
inline constexpr std::uint8_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryRecordSize = 24;

/// Streaming writer for either format. Binary output requires ids < 2^64.
class RecordWriter {
 public:
  RecordWriter(std::ostream& out, RecordFormat format, bool csv_header = false);
  ~RecordWriter();
  void write(const PacketRecord& r);
  void write(std::span<const PacketRecord> records);
  void flush();

 private:
  std::ostream& out_;
  RecordFormat format_;
  std::string buffer_;
};

// ---------------------------------------------------------------------------
// Filtering and windowing

/// Subsequence of `records` accepted by `filter`, order preserved.
std::vector<PacketRecord> filter_valid(std::span<const PacketRecord> records,
                                       const PacketFilter& filter);

/// Fixed-count windows over an in-memory sequence. A trailing partial window
/// is dropped and its size written to `stats->dropped`.
std::vector<Window> window_stream(std::span<const PacketRecord> records, WindowSpec spec,
                                  StreamStats* stats = nullptr);

using RecordSource = std::function<bool(PacketRecord&)>;

/// Pull-based filter + window pipeline over any record source.
class WindowStream {
 public:
  WindowStream(RecordSource source, PacketFilter filter, WindowSpec spec);
  WindowStream(RecordReader& reader, PacketFilter filter, WindowSpec spec);

  std::optional<Window> next();
  const StreamStats& stats() const noexcept { return stats_; }

 private:
  RecordSource source_;
  PacketFilter filter_;
  WindowSpec spec_;
  StreamStats stats_;
  bool exhausted_ = false;
};

}  // namespace tlns
