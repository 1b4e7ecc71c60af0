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

#include "tlns/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "tlns/error.hpp"

namespace tlns {

RecordFormat parse_format(std::string_view name) {
  if (name == "csv") return RecordFormat::kCsv;
  if (name == "binary" || name == "bin") return RecordFormat::kBinary;
  if (name == "auto") return RecordFormat::kAuto;
  throw DomainError("unknown record format '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// PacketFilter

namespace {

bool in_any(const std::vector<AddressRange>& ranges, Address a) noexcept {
  if (ranges.empty()) return true;
  for (const auto& r : ranges) {
    if (r.contains(a)) return true;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T, typename Parse>
Interval<T> parse_interval(std::string_view text, Parse parse) {
  text = trim(text);
  const auto dash = text.find('-');
  Interval<T> iv;
  const bool ok = dash == std::string_view::npos
                      ? parse(text, iv.low) && parse(text, iv.high)
                      : parse(trim(text.substr(0, dash)), iv.low) &&
                            parse(trim(text.substr(dash + 1)), iv.high);
  if (!ok) throw DomainError("bad interval '" + std::string(text) + "'");
  return iv;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

bool PacketFilter::accepts(const PacketRecord& r) const noexcept {
  if (time_range && !time_range->contains(r.timestamp)) return false;
  return in_any(src_ranges, r.src) && in_any(dst_ranges, r.dst);
}

void PacketFilter::validate() const {
  for (const auto* list : {&src_ranges, &dst_ranges}) {
    for (const auto& r : *list) {
      if (r.low > r.high) {
        throw DomainError("address interval " + to_string(r.low) + "-" + to_string(r.high) +
                          " has low > high");
      }
    }
  }
  if (time_range && time_range->low > time_range->high) {
    throw DomainError("time interval has low > high");
  }
}

PacketFilter PacketFilter::parse(std::string_view spec) {
  PacketFilter f;
  spec = trim(spec);
  while (!spec.empty()) {
    const auto semi = spec.find(';');
    std::string_view clause = trim(spec.substr(0, semi));
    spec = semi == std::string_view::npos ? std::string_view{} : spec.substr(semi + 1);
    if (clause.empty()) continue;
    const auto eq = clause.find('=');
    if (eq == std::string_view::npos) {
      throw DomainError("filter clause '" + std::string(clause) + "' lacks '='");
    }
    const std::string_view key = trim(clause.substr(0, eq));
    std::string_view values = clause.substr(eq + 1);
    if (key == "time") {
      f.time_range = parse_interval<Timestamp>(values, parse_u64);
      continue;
    }
    std::vector<AddressRange>* target = nullptr;
    if (key == "src") {
      target = &f.src_ranges;
    } else if (key == "dst") {
      target = &f.dst_ranges;
    } else {
      throw DomainError("unknown filter key '" + std::string(key) + "'");
    }
    while (!values.empty()) {
      const auto comma = values.find(',');
      target->push_back(parse_interval<Address>(values.substr(0, comma), parse_address));
      values = comma == std::string_view::npos ? std::string_view{} : values.substr(comma + 1);
    }
  }
  f.validate();
  return f;
}

// ---------------------------------------------------------------------------
// Byte sources

namespace {

class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::filesystem::path& path)
      : file_(std::fopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  ~FileSource() override { std::fclose(file_); }
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;

  std::size_t read(char* dst, std::size_t n) override {
    const std::size_t got = std::fread(dst, 1, n, file_);
    if (got == 0 && std::ferror(file_)) throw Error("read error");
    return got;
  }

 private:
  std::FILE* file_;
};

class GzipSource final : public ByteSource {
 public:
  explicit GzipSource(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw Error("cannot open " + path.string());
    gzbuffer(file_, 1 << 17);
  }
  ~GzipSource() override { gzclose(file_); }
  GzipSource(const GzipSource&) = delete;
  GzipSource& operator=(const GzipSource&) = delete;

  std::size_t read(char* dst, std::size_t n) override {
    const int got = gzread(file_, dst, static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30)));
    if (got < 0) {
      int errnum = 0;
      throw Error(std::string("gzip read error: ") + gzerror(file_, &errnum));
    }
    return static_cast<std::size_t>(got);
  }

 private:
  gzFile file_;
};

class StreamSource final : public ByteSource {
 public:
  explicit StreamSource(std::istream& in) : in_(in) {}
  std::size_t read(char* dst, std::size_t n) override {
    in_.read(dst, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::istream& in_;
};

}  // namespace

std::unique_ptr<ByteSource> open_input(const std::filesystem::path& path) {
  if (path.extension() == ".gz") return std::make_unique<GzipSource>(path);
  return std::make_unique<FileSource>(path);
}

std::unique_ptr<ByteSource> stream_source(std::istream& in) {
  return std::make_unique<StreamSource>(in);
}

// ---------------------------------------------------------------------------
// RecordReader

struct RecordReader::Impl {
  static constexpr std::size_t kChunk = 1 << 20;

  std::unique_ptr<ByteSource> source;
  RecordFormat format;
  ReaderOptions options;
  std::vector<char> buf = std::vector<char>(kChunk);
  std::size_t pos = 0;
  std::size_t end = 0;
  bool eof = false;
  std::uint64_t line = 0;         // CSV: last line number consumed
  std::uint64_t byte_offset = 0;  // absolute offset of buf[pos]
  std::uint64_t count = 0;
  bool have_prev = false;
  Timestamp prev = 0;
  bool header_checked = false;

  // Keeps [pos, end) and appends more input. Returns false at end of input.
  bool refill() {
    if (eof) return false;
    if (pos > 0) {
      std::memmove(buf.data(), buf.data() + pos, end - pos);
      end -= pos;
      pos = 0;
    }
    if (end == buf.size()) buf.resize(buf.size() * 2);
    const std::size_t got = source->read(buf.data() + end, buf.size() - end);
    if (got == 0) {
      eof = true;
      return false;
    }
    end += got;
    return true;
  }

  void detect_format() {
    while (end - pos < 4 && refill()) {
    }
    if (end - pos >= 4 && std::memcmp(buf.data() + pos, kBinaryMagic, 4) == 0) {
      format = RecordFormat::kBinary;
    } else {
      format = RecordFormat::kCsv;
    }
  }

  void read_binary_header() {
    while (end - pos < 5 && refill()) {
    }
    if (end - pos < 5 || std::memcmp(buf.data() + pos, kBinaryMagic, 4) != 0) {
      throw ParseError("missing TLNS magic", 0);
    }
    const auto version = static_cast<std::uint8_t>(buf[pos + 4]);
    if (version != kBinaryVersion) {
      throw ParseError("unsupported binary version " + std::to_string(version), 4);
    }
    pos += 5;
    byte_offset = 5;
  }

  void check_order(Timestamp t, std::uint64_t where) {
    if (have_prev && t + options.max_regression_us < prev) {
      throw ParseError("timestamp regression: " + std::to_string(t) + " after " +
                           std::to_string(prev) + " (record " + std::to_string(count + 1) + ")",
                       where);
    }
    if (!have_prev || t > prev) prev = t;
    have_prev = true;
  }

  static std::uint64_t le64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
  }

  bool next_binary(PacketRecord& out) {
    if (end - pos < kBinaryRecordSize) {
      while (end - pos < kBinaryRecordSize && refill()) {
      }
      if (end == pos) return false;
      if (end - pos < kBinaryRecordSize) {
        throw ParseError("truncated binary record", byte_offset);
      }
    }
    const char* p = buf.data() + pos;
    out.timestamp = le64(p);
    out.src = le64(p + 8);
    out.dst = le64(p + 16);
    check_order(out.timestamp, byte_offset);
    pos += kBinaryRecordSize;
    byte_offset += kBinaryRecordSize;
    ++count;
    return true;
  }

  // Returns the next raw line without its terminator, or nullopt at EOF.
  std::optional<std::string_view> next_line() {
    for (;;) {
      const char* start = buf.data() + pos;
      const void* nl = std::memchr(start, '\n', end - pos);
      if (nl != nullptr) {
        const auto len = static_cast<std::size_t>(static_cast<const char*>(nl) - start);
        pos += len + 1;
        ++line;
        return std::string_view(start, len);
      }
      if (!refill()) {
        if (pos == end) return std::nullopt;
        std::string_view rest(buf.data() + pos, end - pos);
        pos = end;
        ++line;
        return rest;
      }
    }
  }

  static bool parse_u64_field(const char*& p, const char* e, std::uint64_t& v) {
    const auto [q, ec] = std::from_chars(p, e, v);
    if (ec != std::errc() || q == p) return false;
    p = q;
    return true;
  }

  static bool parse_addr_field(const char*& p, const char* e, Address& v) {
    const char* q = p;
    while (q < e && *q >= '0' && *q <= '9') ++q;
    if (q == p) return false;
    if (q - p <= 19) {
      std::uint64_t small = 0;
      std::from_chars(p, q, small);
      v = small;
    } else if (!parse_address(std::string_view(p, static_cast<std::size_t>(q - p)), v)) {
      return false;
    }
    p = q;
    return true;
  }

  bool parse_row(std::string_view row, PacketRecord& out) const {
    const char* p = row.data();
    const char* e = p + row.size();
    return parse_u64_field(p, e, out.timestamp) && p < e && *p++ == ',' &&
           parse_addr_field(p, e, out.src) && p < e && *p++ == ',' &&
           parse_addr_field(p, e, out.dst) && p == e;
  }

  bool next_csv(PacketRecord& out) {
    for (;;) {
      auto raw = next_line();
      if (!raw) return false;
      std::string_view row = *raw;
      if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
      if (row.empty() || row.front() == '#') continue;
      if (!header_checked) {
        header_checked = true;
        if (trim(row) == "timestamp_us,src,dst") continue;
      }
      if (!parse_row(row, out)) {
        std::string_view shown = row.substr(0, 64);
        throw ParseError("malformed CSV row " + std::to_string(line) + ": '" +
                             std::string(shown) + "'",
                         line);
      }
      check_order(out.timestamp, line);
      ++count;
      return true;
    }
  }
};

RecordReader::RecordReader(std::unique_ptr<ByteSource> source, RecordFormat format,
                           ReaderOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->source = std::move(source);
  impl_->format = format;
  impl_->options = options;
  if (impl_->format == RecordFormat::kAuto) impl_->detect_format();
  if (impl_->format == RecordFormat::kBinary) impl_->read_binary_header();
}

RecordReader::~RecordReader() = default;
RecordReader::RecordReader(RecordReader&&) noexcept = default;
RecordReader& RecordReader::operator=(RecordReader&&) noexcept = default;

RecordReader RecordReader::open(const std::filesystem::path& path, RecordFormat format,
                                ReaderOptions options) {
  return RecordReader(open_input(path), format, options);
}

bool RecordReader::next(PacketRecord& out) {
  return impl_->format == RecordFormat::kBinary ? impl_->next_binary(out) : impl_->next_csv(out);
}

std::uint64_t RecordReader::records_read() const noexcept { return impl_->count; }
RecordFormat RecordReader::format() const noexcept { return impl_->format; }

std::vector<PacketRecord> read_all(RecordReader& reader) {
  std::vector<PacketRecord> out;
  PacketRecord r;
  while (reader.next(r)) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// RecordWriter

RecordWriter::RecordWriter(std::ostream& out, RecordFormat format, bool csv_header)
    : out_(out), format_(format == RecordFormat::kAuto ? RecordFormat::kCsv : format) {
  if (format_ == RecordFormat::kBinary) {
    out_.write(kBinaryMagic, 4);
    out_.put(static_cast<char>(kBinaryVersion));
  } else if (csv_header) {
    out_ << "timestamp_us,src,dst\n";
  }
  buffer_.reserve(1 << 20);
}

RecordWriter::~RecordWriter() { flush(); }

namespace {

void append_u64(std::string& s, std::uint64_t v) {
  char tmp[24];
  const auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
  s.append(tmp, p);
}

void append_addr(std::string& s, Address a) {
  if (high_bits(a) == 0) {
    append_u64(s, low_bits(a));
  } else {
    s += to_string(a);
  }
}

void append_le64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

void RecordWriter::write(const PacketRecord& r) {
  if (format_ == RecordFormat::kBinary) {
    if (high_bits(r.src) != 0 || high_bits(r.dst) != 0) {
      throw DomainError("binary format holds 64-bit ids only");
    }
    append_le64(buffer_, r.timestamp);
    append_le64(buffer_, low_bits(r.src));
    append_le64(buffer_, low_bits(r.dst));
  } else {
    append_u64(buffer_, r.timestamp);
    buffer_.push_back(',');
    append_addr(buffer_, r.src);
    buffer_.push_back(',');
    append_addr(buffer_, r.dst);
    buffer_.push_back('\n');
  }
  if (buffer_.size() >= (1 << 20)) flush();
}

void RecordWriter::write(std::span<const PacketRecord> records) {
  for (const auto& r : records) write(r);
}

void RecordWriter::flush() {
  if (!buffer_.empty()) {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }
  out_.flush();
}

// ---------------------------------------------------------------------------
// Filtering and windowing

std::vector<PacketRecord> filter_valid(std::span<const PacketRecord> records,
                                       const PacketFilter& filter) {
  if (filter.accepts_all()) return {records.begin(), records.end()};
  std::vector<PacketRecord> out;
  for (const auto& r : records) {
    if (filter.accepts(r)) out.push_back(r);
  }
  return out;
}

std::vector<Window> window_stream(std::span<const PacketRecord> records, WindowSpec spec,
                                  StreamStats* stats) {
  if (spec.n_valid < 1) throw DomainError("n_valid must be >= 1");
  const std::size_t n = spec.n_valid;
  const std::size_t full = records.size() / n;
  std::vector<Window> out;
  out.reserve(full);
  for (std::size_t w = 0; w < full; ++w) {
    Window win;
    win.index = w;
    win.records.assign(records.begin() + static_cast<std::ptrdiff_t>(w * n),
                       records.begin() + static_cast<std::ptrdiff_t>((w + 1) * n));
    win.start = win.records.front().timestamp;
    win.end = win.records.back().timestamp;
    out.push_back(std::move(win));
  }
  if (stats != nullptr) {
    stats->records_read = records.size();
    stats->records_rejected = 0;
    stats->windows = full;
    stats->dropped = records.size() - full * n;
  }
  return out;
}

WindowStream::WindowStream(RecordSource source, PacketFilter filter, WindowSpec spec)
    : source_(std::move(source)), filter_(std::move(filter)), spec_(spec) {
  if (spec_.n_valid < 1) throw DomainError("n_valid must be >= 1");
  filter_.validate();
}

WindowStream::WindowStream(RecordReader& reader, PacketFilter filter, WindowSpec spec)
    : WindowStream([&reader](PacketRecord& r) { return reader.next(r); }, std::move(filter),
                   spec) {}

std::optional<Window> WindowStream::next() {
  if (exhausted_) return std::nullopt;
  Window win;
  win.index = stats_.windows;
  win.records.reserve(spec_.n_valid);
  const bool all = filter_.accepts_all();
  PacketRecord r;
  while (win.records.size() < spec_.n_valid) {
    if (!source_(r)) {
      exhausted_ = true;
      stats_.dropped = win.records.size();
      return std::nullopt;
    }
    ++stats_.records_read;
    if (!all && !filter_.accepts(r)) {
      ++stats_.records_rejected;
      continue;
    }
    win.records.push_back(r);
  }
  win.start = win.records.front().timestamp;
  win.end = win.records.back().timestamp;
  ++stats_.windows;
  return win;
}

}  // namespace tlns
