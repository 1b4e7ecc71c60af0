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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace tlns {

/// Raw source/destination identifier. 128 bits wide so IPv6 fits; no
/// semantic meaning is attached (it may already be anonymized).
using Address = unsigned __int128;

using Timestamp = std::uint64_t;  // microseconds since epoch
using Count = std::uint64_t;

/// Decimal rendering of a 128-bit address.
std::string to_string(Address a);

/// Strict decimal parse. Returns false on empty input, non-digits or overflow.
bool parse_address(std::string_view text, Address& out);

inline constexpr Address make_address(std::uint64_t hi, std::uint64_t lo) {
  return (static_cast<Address>(hi) << 64) | lo;
}
inline constexpr std::uint64_t high_bits(Address a) {
  return static_cast<std::uint64_t>(a >> 64);
}
inline constexpr std::uint64_t low_bits(Address a) {
  return static_cast<std::uint64_t>(a);
}

struct AddressHash {
  std::size_t operator()(Address a) const noexcept {
    std::uint64_t x = low_bits(a) ^ (high_bits(a) * 0x9e3779b97f4a7c15ULL);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

struct Link {
  Address src = 0;
  Address dst = 0;
  friend bool operator==(const Link&, const Link&) = default;
  friend std::strong_ordering operator<=>(const Link& a, const Link& b) {
    if (a.src != b.src) {
      return a.src < b.src ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a.dst != b.dst) {
      return a.dst < b.dst ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }
};

struct LinkHash {
  std::size_t operator()(const Link& l) const noexcept {
    AddressHash h;
    return h(l.src) ^ (h(l.dst) * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  }
};

}  // namespace tlns
