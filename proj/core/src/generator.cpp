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

#include "tlns/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "tlns/error.hpp"
#include "tlns/model.hpp"
#include "tlns/serialization.hpp"

namespace tlns {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
  // Lemire's multiply-and-reject.
  unsigned __int128 m = static_cast<unsigned __int128>(eng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(eng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

namespace {

enum Stream : std::uint64_t { kIntensity = 0, kLifetime = 1, kVisibility = 2 };

// Counter-based uniform in (0, 1) for (seed, source, stream, window).
double keyed_uniform(std::uint64_t seed, std::uint64_t source, std::uint64_t stream,
                     std::uint64_t window = 0) {
  std::uint64_t x = mix64(seed);
  x = mix64(x ^ source);
  x = mix64(x ^ (stream << 56) ^ window);
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

Engine window_engine(std::uint64_t seed, std::uint64_t window, std::uint64_t stream) {
  return Engine(mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) ^ mix64(window * 4 + stream)));
}

double cauchy(double alpha, double beta, double t) {
  return t == 0 ? 1.0 : beta / (beta + std::pow(t, alpha));
}

void check_law(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

// P(L >= j) for j = 1..horizon.
std::vector<double> lifetime_survival(double alpha, double beta, std::uint64_t horizon) {
  const double denom = 1.0 - cauchy(alpha, beta, 1);
  std::vector<double> g(horizon);
  for (std::uint64_t j = 1; j <= horizon; ++j) {
    const double jd = static_cast<double>(j);
    g[j - 1] = (cauchy(alpha, beta, jd - 1) - cauchy(alpha, beta, jd)) / denom;
  }
  g[0] = 1.0;
  return g;
}

// Largest j with P(L >= j) >= u; `horizon + 1` stands for "outlives the run".
std::uint64_t sample_lifetime(const std::vector<double>& survival, double u) {
  auto it = std::partition_point(survival.begin(), survival.end(),
                                 [u](double g) { return g >= u; });
  const auto j = static_cast<std::uint64_t>(it - survival.begin());
  return it == survival.end() ? survival.size() + 1 : j;
}

// Residual windows R with P(R > t) = C(t), capped at `horizon + 1`.
std::uint64_t sample_residual(double alpha, double beta, double u, std::uint64_t horizon) {
  const double x = std::pow(beta * (1.0 / u - 1.0), 1.0 / alpha);
  if (!(x < static_cast<double>(horizon))) return horizon + 1;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x)));
}

// Fenwick tree over per-source removable packets.
class Fenwick {
 public:
  explicit Fenwick(std::span<const Count> values) : tree_(values.size() + 1, 0) {
    for (std::size_t i = 0; i < values.size(); ++i) add(i, values[i]);
  }
  void add(std::size_t i, std::int64_t delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) {
      tree_[i] = static_cast<Count>(static_cast<std::int64_t>(tree_[i]) + delta);
    }
  }
  // Index of the element holding the k-th unit (0-based).
  std::size_t find(Count k) const {
    std::size_t pos = 0;
    std::size_t step = std::bit_floor(tree_.size() - 1);
    for (; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= k) {
        pos += step;
        k -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<Count> tree_;
};

}  // namespace

// ---------------------------------------------------------------------------

ZipfMandelbrotSampler::ZipfMandelbrotSampler(double delta, double lambda, Count d_max) {
  check_law(delta > -1.0, "zipf-mandelbrot delta must be > -1");
  check_law(lambda > 0.0, "zipf-mandelbrot lambda must be > 0");
  check_law(d_max >= 1, "zipf-mandelbrot d_max must be >= 1");
  cdf_.resize(d_max);
  double sum = 0;
  for (Count d = 1; d <= d_max; ++d) {
    sum += std::pow(static_cast<double>(d) + delta, -lambda);
    cdf_[d - 1] = sum;
  }
  for (auto& c : cdf_) c /= sum;
  cdf_.back() = 1.0;
}

Count ZipfMandelbrotSampler::from_uniform(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return d_max();
  return static_cast<Count>(it - cdf_.begin()) + 1;
}

double ZipfMandelbrotSampler::probability(Count d) const {
  if (d < 1 || d > d_max()) return 0.0;
  return d == 1 ? cdf_[0] : cdf_[d - 1] - cdf_[d - 2];
}

Count sample_zipf_mandelbrot(double delta, double lambda, Count d_max, Engine& eng) {
  return ZipfMandelbrotSampler(delta, lambda, d_max).sample(eng);
}

void SyntheticScenario::validate() const {
  check_law(n_sources >= 1 && n_sources <= (std::uint64_t{1} << 32),
            "n_sources must lie in [1, 2^32]");
  check_law(zm_delta > -1.0 && zm_delta <= 10.0, "zm delta must lie in (-1, 10]");
  check_law(zm_lambda > 0.0 && zm_lambda <= 6.0, "zm lambda must lie in (0, 6]");
  check_law(zm_d_max >= 1, "zm d_max must be >= 1");
  check_law(cauchy_alpha > 0.0 && cauchy_alpha <= 1.0,
            "cauchy alpha must lie in (0, 1] for a realizable presence process");
  check_law(cauchy_beta > 0.0 && cauchy_beta <= 1e6, "cauchy beta must lie in (0, 1e6]");
  check_law(n_windows >= 1, "n_windows must be >= 1");
  check_law(n_valid >= 1, "n_valid must be >= 1");
  check_law(dest_pool >= 1 && dest_pool < (std::uint64_t{1} << 32),
            "dest_pool must lie in [1, 2^32)");
  check_law(dest_delta > -1.0 && dest_lambda > 0.0, "destination popularity law out of range");
}

Address source_address(std::uint64_t index) noexcept {
  return static_cast<std::uint32_t>(index * 0x9e3779b1ULL + 0x7f4a7c15ULL);
}

Address destination_address(std::uint64_t rank) noexcept {
  return (Address{1} << 32) | static_cast<std::uint32_t>(rank * 0x85ebca77ULL + 0xc2b2ae3dULL);
}

// ---------------------------------------------------------------------------

struct PresenceEngine::Impl {
  struct Active {
    std::uint64_t index;
    Count intensity;
    std::uint64_t end;  // first window without this source
  };

  SyntheticScenario s;
  ZipfMandelbrotSampler intensity;
  std::vector<double> survival;
  std::vector<Active> active;
  std::uint64_t next_index = 0;
  std::uint64_t window = 0;

  explicit Impl(const SyntheticScenario& sc)
      : s(sc),
        intensity(sc.zm_delta, sc.zm_lambda, sc.zm_d_max),
        survival(lifetime_survival(sc.cauchy_alpha, sc.cauchy_beta, sc.n_windows)) {}

  std::vector<SourceEmission> next(WindowFill& fill) {
    const std::uint64_t w = window++;
    fill = WindowFill{};
    fill.index = w;
    std::erase_if(active, [w](const Active& a) { return a.end <= w; });

    std::vector<SourceEmission> out;
    out.reserve(active.size() + active.size() / 8 + 16);
    Count total = 0;
    for (const auto& a : active) {
      out.push_back({a.index, a.intensity});
      total += a.intensity;
    }
    if (total > s.n_valid) {
      trim(out, total - s.n_valid, w);
      fill.trimmed = total - s.n_valid;
      total = s.n_valid;
    }
    while (total < s.n_valid) {
      const std::uint64_t i = next_index++;
      const Count d = intensity.from_uniform(keyed_uniform(s.seed, i, kIntensity));
      const double u = keyed_uniform(s.seed, i, kLifetime);
      const std::uint64_t life = w == 0
                                     ? sample_residual(s.cauchy_alpha, s.cauchy_beta, u, s.n_windows)
                                     : sample_lifetime(survival, u);
      active.push_back({i, d, w + life});
      const Count emitted = std::min(d, s.n_valid - total);
      fill.truncated += d - emitted;
      out.push_back({i, emitted});
      total += emitted;
      ++fill.arrivals;
    }
    fill.sources = out.size();
    return out;
  }

  // Removes `excess` packets uniformly at random, never a source's last one.
  void trim(std::vector<SourceEmission>& out, Count excess, std::uint64_t w) {
    if (out.size() > s.n_valid) {
      throw DomainError("window " + std::to_string(w) + " has " + std::to_string(out.size()) +
                        " surviving sources, more than n_valid " + std::to_string(s.n_valid));
    }
    std::vector<Count> removable(out.size());
    Count pool = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      removable[k] = out[k].packets - 1;
      pool += removable[k];
    }
    Fenwick tree(removable);
    Engine eng = window_engine(s.seed, w, 1);
    for (Count r = 0; r < excess; ++r) {
      const std::size_t k = tree.find(uniform_below(eng, pool));
      tree.add(k, -1);
      --out[k].packets;
      --pool;
    }
  }
};

PresenceEngine::PresenceEngine(const SyntheticScenario& s) : impl_(std::make_unique<Impl>(s)) {}
PresenceEngine::~PresenceEngine() = default;
PresenceEngine::PresenceEngine(PresenceEngine&&) noexcept = default;
PresenceEngine& PresenceEngine::operator=(PresenceEngine&&) noexcept = default;

std::vector<SourceEmission> PresenceEngine::next(WindowFill& fill) { return impl_->next(fill); }
std::uint64_t PresenceEngine::sources_used() const noexcept { return impl_->next_index; }

std::uint64_t required_sources(const SyntheticScenario& s) {
  s.validate();
  PresenceEngine engine(s);
  WindowFill fill;
  for (std::uint64_t w = 0; w < s.n_windows; ++w) engine.next(fill);
  return engine.sources_used();
}

// ---------------------------------------------------------------------------

namespace {

const SyntheticScenario& checked(const SyntheticScenario& s) {
  s.validate();
  const std::uint64_t need = required_sources(s);
  if (need > s.n_sources) {
    throw InfeasibleScenario("scenario needs a population of at least " + std::to_string(need) +
                                 " sources; n_sources is " + std::to_string(s.n_sources),
                             need);
  }
  return s;
}

}  // namespace

StreamGenerator::StreamGenerator(const SyntheticScenario& s)
    : scenario_(checked(s)),
      presence_(s),
      dest_(s.dest_delta, s.dest_lambda, s.dest_pool) {}

std::optional<Window> StreamGenerator::next() {
  if (window_ == scenario_.n_windows) return std::nullopt;
  const std::uint64_t w = window_++;
  WindowFill fill;
  emissions_ = presence_.next(fill);
  report_.windows.push_back(fill);
  report_.sources_used = presence_.sources_used();
  report_.packets += scenario_.n_valid;

  Engine eng = window_engine(scenario_.seed, w, 2);
  Window out;
  out.index = w;
  out.records.reserve(scenario_.n_valid);
  for (const auto& e : emissions_) {
    const Address src = source_address(e.source);
    for (Count k = 0; k < e.packets; ++k) {
      out.records.push_back({0, src, destination_address(dest_.sample(eng))});
    }
  }
  auto& r = out.records;
  for (std::size_t k = r.size(); k > 1; --k) std::swap(r[k - 1], r[uniform_below(eng, k)]);
  const Timestamp base = scenario_.start_us + w * scenario_.n_valid;
  for (std::size_t k = 0; k < r.size(); ++k) r[k].timestamp = base + k;
  out.start = r.front().timestamp;
  out.end = r.back().timestamp;
  return out;
}

GenerationReport generate_stream(const SyntheticScenario& s, std::ostream& csv) {
  StreamGenerator gen(s);
  RecordWriter writer(csv, RecordFormat::kCsv, true);
  while (auto w = gen.next()) writer.write(w->records);
  writer.flush();
  return gen.report();
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& data) {
  auto p = data;
  p.replace_extension(".truth.json");
  return p;
}

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  return out;
}

}  // namespace

std::filesystem::path generate_stream(const SyntheticScenario& s,
                                      const std::filesystem::path& csv_path) {
  GenerationReport report;
  {
    auto out = open_output(csv_path);
    report = generate_stream(s, out);
    if (!out) throw Error("write failed: " + csv_path.string());
  }
  const auto side = sidecar_path(csv_path);
  write_text_file(side, generation_sidecar_json(s, report));
  return side;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Sink>
GenerationReport two_observers(const SyntheticScenario& s, Sink&& sink) {
  if (s.observer_b_rule != ObserverRule::kModelVisibility) {
    throw DomainError("two-observer generation needs observer_b_rule = model_visibility");
  }
  if (s.n_valid < 4) throw DomainError("two-observer generation needs n_valid >= 4");
  StreamGenerator gen(s);
  std::vector<PacketRecord> b;
  const Address sensor = destination_address(0);
  while (auto w = gen.next()) {
    b.clear();
    Timestamp ts = w->start;
    for (const auto& e : gen.last_emissions()) {
      const double p = second_observer_probability(e.packets, s.n_valid);
      if (keyed_uniform(s.seed, e.source, kVisibility, w->index) < p) {
        b.push_back({std::min(ts++, w->end), source_address(e.source), sensor});
      }
    }
    sink(w->records, b);
  }
  return gen.report();
}

}  // namespace

TwoObserverStreams generate_two_observers(const SyntheticScenario& s) {
  TwoObserverStreams out;
  out.report = two_observers(s, [&](const auto& a, const auto& b) {
    out.a.insert(out.a.end(), a.begin(), a.end());
    out.b.insert(out.b.end(), b.begin(), b.end());
  });
  return out;
}

TwoObserverFiles generate_two_observers(const SyntheticScenario& s,
                                        const std::filesystem::path& a_path,
                                        const std::filesystem::path& b_path) {
  auto a_out = open_output(a_path);
  auto b_out = open_output(b_path);
  RecordWriter a_writer(a_out, RecordFormat::kCsv, true);
  RecordWriter b_writer(b_out, RecordFormat::kCsv, true);
  const auto report = two_observers(s, [&](const auto& a, const auto& b) {
    a_writer.write(a);
    b_writer.write(b);
  });
  a_writer.flush();
  b_writer.flush();
  if (!a_out || !b_out) throw Error("write failed for observer streams");
  TwoObserverFiles files{a_path, b_path, sidecar_path(a_path)};
  write_text_file(files.sidecar, generation_sidecar_json(s, report));
  return files;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Address>> simulate_presence(double alpha, double beta,
                                                    std::uint64_t population,
                                                    std::uint64_t n_windows, std::uint64_t seed) {
  check_law(alpha > 0 && alpha <= 1, "alpha must lie in (0, 1]");
  check_law(beta > 0, "beta must be positive");
  check_law(population >= 1 && n_windows >= 1, "population and n_windows must be positive");
  const auto survival = lifetime_survival(alpha, beta, n_windows);
  const auto arrivals = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(population) * (1.0 - cauchy(alpha, beta, 1))));

  struct Active {
    std::uint64_t index;
    std::uint64_t end;
  };
  std::vector<Active> active;
  std::uint64_t next = 0;
  for (; next < population; ++next) {
    active.push_back(
        {next, sample_residual(alpha, beta, keyed_uniform(seed, next, kLifetime), n_windows)});
  }
  std::vector<std::vector<Address>> sets(n_windows);
  for (std::uint64_t w = 0; w < n_windows; ++w) {
    if (w > 0) {
      for (std::uint64_t k = 0; k < arrivals; ++k, ++next) {
        active.push_back({next, w + sample_lifetime(survival, keyed_uniform(seed, next, kLifetime))});
      }
    }
    std::erase_if(active, [w](const Active& a) { return a.end <= w; });
    sets[w].reserve(active.size());
    for (const auto& a : active) sets[w].push_back(a.index);
  }
  return sets;
}

}  // namespace tlns
