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
#include <stdexcept>
#include <string>

namespace tlns {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-order input. `location` is a 1-based line number for
/// CSV and a byte offset for binary input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t location)
      : Error(what), location_(location) {}
  std::uint64_t location() const noexcept { return location_; }

 private:
  std::uint64_t location_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Which of the empirical laws a fit failure belongs to.
enum class Law { kWindowScaling, kZipfMandelbrot, kModifiedCauchy, kCrossCorrelation };

inline const char* law_name(Law law) noexcept {
  switch (law) {
    case Law::kWindowScaling:
      return "window scaling";
    case Law::kZipfMandelbrot:
      return "zipf-mandelbrot";
    case Law::kModifiedCauchy:
      return "modified cauchy";
    case Law::kCrossCorrelation:
      return "cross correlation";
  }
  return "unknown";
}

class FitError : public Error {
 public:
  FitError(Law law, const std::string& what)
      : Error(std::string(law_name(law)) + ": " + what), law_(law) {}
  Law law() const noexcept { return law_; }

 private:
  Law law_;
};

/// Generator scenario cannot be realized with the given source population.
class InfeasibleScenario : public Error {
 public:
  InfeasibleScenario(const std::string& what, std::uint64_t required_sources)
      : Error(what), required_(required_sources) {}
  std::uint64_t required_sources() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

}  // namespace tlns
