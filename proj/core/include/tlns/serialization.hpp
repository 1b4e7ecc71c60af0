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

#include <filesystem>
#include <string>
#include <string_view>

#include "tlns/fitting.hpp"
#include "tlns/generator.hpp"
#include "tlns/model.hpp"
#include "tlns/statistics.hpp"
#include "tlns/traffic_matrix.hpp"

namespace tlns {

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Matrices: `src\tdst\tcount` rows in (src, dst) order, plus a JSON sidecar
// with n_valid, window_index and time_span. Round trips are byte-exact.
std::string matrix_tsv(const TrafficMatrix& m);
std::string matrix_sidecar_json(const TrafficMatrix& m);
TrafficMatrix parse_matrix(std::string_view tsv, std::string_view sidecar_json);

// Plot tables: `x\tvalue\tsigma\tn` with a header row.
std::string histogram_tsv(const DegreeHistogram& h);
std::string curve_tsv(const CorrelationCurve& c);
/// Adds a `model` column with the capped visibility law per bucket.
std::string cross_correlation_tsv(const CrossCorrelation& c);

std::string aggregates_tsv_header();
std::string aggregates_tsv_row(std::uint64_t window, const NetworkAggregates& a);

std::string fit_json(const ScalingFit& f);
std::string fit_json(const ZipfMandelbrotFit& f);
std::string fit_json(const CauchyFit& f);

std::string model_json(const ModelParameters& p);
/// Throws ParseError on malformed JSON and DomainError on out-of-range values.
ModelParameters parse_model_json(std::string_view text);

std::string observability_json(const ObservabilityQuery& q, const ObservabilityScore& s);

std::string generation_sidecar_json(const SyntheticScenario& s, const GenerationReport& r);

/// Shortest decimal that round-trips.
std::string format_double(double v);

}  // namespace tlns
