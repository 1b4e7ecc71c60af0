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

#include "tlns/anonymize.hpp"

#include <sodium.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlns/error.hpp"

namespace tlns {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error("libsodium initialization failed");
}

}  // namespace

AnonymizationKey parse_key_hex(std::string_view hex) {
  while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r' || hex.back() == ' ')) {
    hex.remove_suffix(1);
  }
  if (hex.size() != 64) throw DomainError("anonymization key must be 64 hex digits");
  AnonymizationKey key{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DomainError("anonymization key has a non-hex digit");
    key[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return key;
}

AnonymizationKey load_key_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open key file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() == 32) {
    AnonymizationKey key{};
    std::copy(bytes.begin(), bytes.end(), key.begin());
    return key;
  }
  return parse_key_hex(bytes);
}

AnonymizationKey load_key_env(const char* variable) {
  const char* value = std::getenv(variable);
  if (value == nullptr) {
    throw DomainError(std::string("environment variable ") + variable + " is not set");
  }
  return parse_key_hex(value);
}

Anonymizer::Anonymizer(const AnonymizationKey& key) {
  ensure_sodium();
  static_assert(crypto_shorthash_KEYBYTES == 16);
  static_assert(crypto_kdf_KEYBYTES == 32);
  for (int r = 0; r < kRounds; ++r) {
    crypto_kdf_derive_from_key(round_keys_[r].data(), round_keys_[r].size(),
                               static_cast<std::uint64_t>(r), "tlnsanon", key.data());
  }
}

std::uint64_t Anonymizer::round_function(int round, std::uint64_t half) const noexcept {
  unsigned char in[8];
  for (int i = 0; i < 8; ++i) in[i] = static_cast<unsigned char>(half >> (8 * i));
  unsigned char out[crypto_shorthash_BYTES];
  crypto_shorthash(out, in, sizeof in, round_keys_[round].data());
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | out[i];
  return v;
}

Address Anonymizer::permute(Address a) const noexcept {
  std::uint64_t left = high_bits(a);
  std::uint64_t right = low_bits(a);
  for (int r = 0; r < kRounds; ++r) {
    const std::uint64_t next = left ^ round_function(r, right);
    left = right;
    right = next;
  }
  return make_address(left, right);
}

Address Anonymizer::invert(Address a) const noexcept {
  std::uint64_t left = high_bits(a);
  std::uint64_t right = low_bits(a);
  for (int r = kRounds - 1; r >= 0; --r) {
    const std::uint64_t prev = right ^ round_function(r, left);
    right = left;
    left = prev;
  }
  return make_address(left, right);
}

TrafficMatrix anonymize(const TrafficMatrix& m, const Anonymizer& anon) {
  std::unordered_map<Address, Address, AddressHash> cache;
  cache.reserve(m.nnz());
  auto relabel = [&](Address a) {
    auto [it, inserted] = cache.try_emplace(a, 0);
    if (inserted) it->second = anon.permute(a);
    return it->second;
  };
  std::vector<MatrixEntry> out;
  out.reserve(m.nnz());
  for (const auto& e : m.entries()) out.push_back({relabel(e.src), relabel(e.dst), e.count});
  return TrafficMatrix::from_entries(std::move(out), m.meta());
}

void anonymize_records(std::span<PacketRecord> records, const Anonymizer& anon) {
  std::unordered_map<Address, Address, AddressHash> cache;
  auto relabel = [&](Address a) {
    auto [it, inserted] = cache.try_emplace(a, 0);
    if (inserted) it->second = anon.permute(a);
    return it->second;
  };
  for (auto& r : records) {
    r.src = relabel(r.src);
    r.dst = relabel(r.dst);
  }
}

TrafficMatrix anonymize(const TrafficMatrix& m, const AnonymizationKey& key) {
  return anonymize(m, Anonymizer(key));
}

}  // namespace tlns
