// Copyright 2026 The ftmr Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ftmr/engine.hpp"

namespace ftmr::bench {

/// Derives an independent sub-seed, e.g. per PE or per iteration.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// mt19937_64 with platform-independent bounded integers and doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  /// Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

struct Edge {
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

struct RmatParams {
  double a = 0.57, b = 0.19, c = 0.19, d = 0.05;
  /// Throws ConfigError unless all are >= 0 and they sum to 1 within 1e-9.
  void validate() const;
};

/// Vertex block [lo, hi) of PE `pe` when n vertices are split over p PEs.
std::pair<std::uint64_t, std::uint64_t> vertex_block(std::uint64_t n, std::uint32_t p, PeId pe);

std::vector<std::string> make_dictionary(std::uint64_t seed, std::size_t words);

/// Lines of up to 16 words drawn uniformly from `dictionary`; key is the
/// 8-byte line id, value the space-separated words.
std::vector<Record> gen_text(std::uint64_t seed, PeId pe, std::uint64_t words_per_pe,
                             const std::vector<std::string>& dictionary);

/// PE `pe`'s share of a G(n, m) digraph: edges drawn uniformly with
/// replacement among ordered pairs without self-loops, restricted to sources
/// in the PE's vertex block. The block receives its proportional share of m.
std::vector<Edge> gen_gnm(std::uint64_t seed, std::uint64_t n, std::uint64_t m, std::uint32_t p,
                          PeId pe);

Edge rmat_edge(Rng& rng, unsigned log_n, const RmatParams& params);

/// PE `pe`'s share (m/p, remainder to the lowest ids) of m R-MAT edges over
/// 2^log_n vertices.
std::vector<Edge> gen_rmat(std::uint64_t seed, unsigned log_n, std::uint64_t m,
                           const RmatParams& params, std::uint32_t p, PeId pe);

// Typed record encodings.
Record edge_record(std::uint64_t u, std::uint64_t v);      // key u, value v
Edge decode_edge(const Record& r);
Record rmat_record(const Edge& e);                         // key (min,max), value (u,v)
Edge decode_rmat(const Record& r);

struct RankState {
  double score = 0.0;
  std::vector<std::uint64_t> adjacency;
};
enum class RankTag : std::uint8_t { score = 0, adjacency = 1, state = 2 };
Record rank_state_record(std::uint64_t vertex, const RankState& s);
RankState decode_rank_state(const Record& r);

// Word Count
StepFns word_count_step();

// R-MAT duplicate elimination
class RmatDedupDriver : public JobDriver {
 public:
  RmatDedupDriver(std::uint64_t seed, unsigned log_n, std::uint64_t total_edges,
                  RmatParams params, std::uint32_t max_iterations = 10000);
  std::optional<StepFns> step(StepId t) override;
  void after_reduce(StepId t, const Aggregates& aggregates) override;
  const std::map<StepId, double>& duplicates() const { return duplicates_; }

 private:
  std::uint64_t seed_;
  unsigned log_n_;
  RmatParams params_;
  std::uint32_t max_iterations_;
  std::map<StepId, double> duplicates_;
  bool done_ = false;
};

// Connected components (alternating Large-Star / Small-Star)
class ConnectedComponentsDriver : public JobDriver {
 public:
  explicit ConnectedComponentsDriver(std::uint32_t max_rounds = 10000)
      : max_rounds_(max_rounds) {}
  std::optional<StepFns> step(StepId t) override;
  void after_reduce(StepId t, const Aggregates& aggregates) override;
  const std::map<StepId, double>& changes() const { return changes_; }

 private:
  std::uint32_t max_rounds_;
  std::map<StepId, double> changes_;
  bool done_ = false;
};

StepFns large_star_step();
StepFns small_star_step();

// PageRank
class PageRankDriver : public JobDriver {
 public:
  PageRankDriver(std::uint64_t n, std::uint32_t iterations, double damping = 0.85)
      : n_(n), iterations_(iterations), damping_(damping) {}
  std::optional<StepFns> step(StepId t) override;
  void after_reduce(StepId t, const Aggregates& aggregates) override;
  /// Global score sum after each iteration.
  const std::map<StepId, double>& score_sums() const { return score_sums_; }
  const std::map<StepId, double>& state_counts() const { return state_counts_; }

 private:
  std::uint64_t n_;
  std::uint32_t iterations_;
  double damping_;
  std::map<StepId, double> score_sums_;
  std::map<StepId, double> state_counts_;
};

// Uniform random keys, identity Map and Reduce; one step.
StepFns identity_step();

enum class Benchmark { wordcount, rmat, cc, pagerank, uniform };
std::string to_string(Benchmark b);
Benchmark parse_benchmark(std::string_view s);

struct BenchmarkParams {
  Benchmark benchmark = Benchmark::wordcount;
  std::uint32_t pes = 1;
  std::uint64_t seed = 1;
  std::uint64_t words_per_pe = 10000;
  std::uint64_t dictionary_size = 1000;
  std::uint64_t vertices_per_pe = 1024;
  /// Negative selects the benchmark default (30 R-MAT, 0.5 CC, 38 PageRank).
  double avg_degree = -1.0;
  std::uint32_t iterations = 100;
  double damping = 0.85;
  std::uint64_t records_per_pe = 6250;
  RmatParams rmat;

  double degree() const;
  std::uint64_t vertices() const { return vertices_per_pe * pes; }
  /// Undirected edge count for R-MAT / CC, directed for PageRank.
  std::uint64_t edges() const;
};

struct Workload {
  InputSource source;
  std::function<std::unique_ptr<JobDriver>()> make_driver;
};

Workload make_workload(const BenchmarkParams& params);

}  // namespace ftmr::bench
