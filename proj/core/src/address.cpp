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

#include "tlns/address.hpp"

#include <algorithm>

namespace tlns {

std::string to_string(Address a) {
  if (a == 0) return "0";
  char buf[40];
  int pos = 40;
  while (a != 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(a % 10));
    a /= 10;
  }
  return std::string(buf + pos, buf + 40);
}

bool parse_address(std::string_view text, Address& out) {
  if (text.empty() || text.size() > 39) return false;
  constexpr Address kMax = ~static_cast<Address>(0);
  Address v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    const unsigned digit = static_cast<unsigned>(c - '0');
    if (v > (kMax - digit) / 10) return false;
    v = v * 10 + digit;
  }
  out = v;
  return true;
}

}  // namespace tlns
