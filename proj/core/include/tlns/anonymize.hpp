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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

#include "tlns/address.hpp"
#include "tlns/traffic_matrix.hpp"

namespace tlns {

using AnonymizationKey = std::array<std::uint8_t, 32>;

/// 64 hex digits -> key. Throws DomainError.
AnonymizationKey parse_key_hex(std::string_view hex);

/// Key from a file holding either 32 raw bytes or 64 hex digits.
AnonymizationKey load_key_file(const std::filesystem::path& path);

/// Key from an environment variable holding 64 hex digits.
AnonymizationKey load_key_env(const char* variable);

/// Keyed pseudorandom permutation of the full 128-bit identifier space.
///
/// Balanced Feistel network over two 64-bit halves; each round XORs a keyed
/// SipHash-2-4 of one half into the other. Any number of Feistel rounds is a
/// bijection, and `invert` runs the rounds backwards.
class Anonymizer {
 public:
  static constexpr int kRounds = 8;

  explicit Anonymizer(const AnonymizationKey& key);

  Address permute(Address a) const noexcept;
  Address invert(Address a) const noexcept;

 private:
  std::uint64_t round_function(int round, std::uint64_t half) const noexcept;

  std::array<std::array<std::uint8_t, 16>, kRounds> round_keys_{};
};

/// Relabels every src and dst through the permutation; counts and metadata
/// are unchanged.
TrafficMatrix anonymize(const TrafficMatrix& m, const Anonymizer& anon);
TrafficMatrix anonymize(const TrafficMatrix& m, const AnonymizationKey& key);

/// Relabels src and dst of every record in place.
void anonymize_records(std::span<PacketRecord> records, const Anonymizer& anon);

}  // namespace tlns
