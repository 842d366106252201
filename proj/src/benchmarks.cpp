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

#include "ftmr/benchmarks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ftmr::bench {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64_mix(seed ^ splitmix64_mix(salt + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % n;
  }
}

void RmatParams::validate() const {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw ConfigError("R-MAT probabilities must be non-negative");
  if (std::abs(a + b + c + d - 1.0) > 1e-9)
    throw ConfigError("R-MAT probabilities must sum to 1");
}

std::pair<std::uint64_t, std::uint64_t> vertex_block(std::uint64_t n, std::uint32_t p, PeId pe) {
  const auto lo = static_cast<std::uint64_t>((static_cast<unsigned __int128>(n) * pe.value) / p);
  const auto hi =
      static_cast<std::uint64_t>((static_cast<unsigned __int128>(n) * (pe.value + 1)) / p);
  return {lo, hi};
}

namespace {

std::uint64_t share_of(std::uint64_t total, std::uint64_t lo, std::uint64_t hi, std::uint64_t n) {
  if (n == 0) return 0;
  const auto scaled = [&](std::uint64_t x) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(total) * x) / n);
  };
  return scaled(hi) - scaled(lo);
}

bool is_space(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\v' || ch == '\f' || ch == '\r';
}

}  // namespace

std::vector<std::string> make_dictionary(std::uint64_t seed, std::size_t words) {
  Rng rng(mix_seed(seed, 0xd1c7));
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < words) {
    std::string w(2 + rng.below(8), 'a');
    for (auto& ch : w) ch = static_cast<char>('a' + rng.below(26));
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<Record> gen_text(std::uint64_t seed, PeId pe, std::uint64_t words_per_pe,
                             const std::vector<std::string>& dictionary) {
  constexpr std::uint64_t kWordsPerLine = 16;
  std::vector<Record> out;
  if (dictionary.empty() || words_per_pe == 0) return out;
  Rng rng(mix_seed(seed, pe.value));
  std::uint64_t line = 0;
  for (std::uint64_t done = 0; done < words_per_pe; ++line) {
    std::string text;
    for (std::uint64_t i = 0; i < kWordsPerLine && done < words_per_pe; ++i, ++done) {
      if (!text.empty()) text.push_back(' ');
      text += dictionary[rng.below(dictionary.size())];
    }
    out.push_back(Record{u64_bytes((std::uint64_t(pe.value) << 32) | line), std::move(text)});
  }
  return out;
}

std::vector<Edge> gen_gnm(std::uint64_t seed, std::uint64_t n, std::uint64_t m, std::uint32_t p,
                          PeId pe) {
  std::vector<Edge> out;
  if (n < 2) return out;
  const auto [lo, hi] = vertex_block(n, p, pe);
  const std::uint64_t count = share_of(m, lo, hi, n);
  Rng rng(mix_seed(seed, pe.value));
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t u = lo + rng.below(hi - lo);
    std::uint64_t v = rng.below(n - 1);
    if (v >= u) ++v;
    out.push_back(Edge{u, v});
  }
  return out;
}

Edge rmat_edge(Rng& rng, unsigned log_n, const RmatParams& params) {
  Edge e;
  for (unsigned level = 0; level < log_n; ++level) {
    const double x = rng.unit();
    const std::uint64_t bit = std::uint64_t(1) << (log_n - 1 - level);
    if (x < params.a) {
    } else if (x < params.a + params.b) {
      e.v |= bit;
    } else if (x < params.a + params.b + params.c) {
      e.u |= bit;
    } else {
      e.u |= bit;
      e.v |= bit;
    }
  }
  return e;
}

std::vector<Edge> gen_rmat(std::uint64_t seed, unsigned log_n, std::uint64_t m,
                           const RmatParams& params, std::uint32_t p, PeId pe) {
  params.validate();
  const std::uint64_t count = m / p + (pe.value < m % p ? 1 : 0);
  Rng rng(mix_seed(seed, pe.value));
  std::vector<Edge> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(rmat_edge(rng, log_n, params));
  return out;
}

Record edge_record(std::uint64_t u, std::uint64_t v) { return Record{u64_bytes(u), u64_bytes(v)}; }

Edge decode_edge(const Record& r) { return Edge{get_u64(r.key), get_u64(r.value)}; }

Record rmat_record(const Edge& e) {
  Record r;
  put_u64(r.key, std::min(e.u, e.v));
  put_u64(r.key, std::max(e.u, e.v));
  put_u64(r.value, e.u);
  put_u64(r.value, e.v);
  return r;
}

Edge decode_rmat(const Record& r) { return Edge{get_u64(r.value, 0), get_u64(r.value, 8)}; }

namespace {

std::string rank_score_value(double s) {
  std::string v(1, static_cast<char>(RankTag::score));
  put_f64(v, s);
  return v;
}

std::string rank_adjacency_value(RankTag tag, const RankState& s) {
  std::string v(1, static_cast<char>(tag));
  if (tag == RankTag::state) put_f64(v, s.score);
  put_u64(v, s.adjacency.size());
  for (auto u : s.adjacency) put_u64(v, u);
  return v;
}

RankState decode_rank_value(std::string_view v) {
  if (v.empty()) throw DecodeError(0, "empty rank record");
  RankState s;
  std::size_t pos = 1;
  const auto tag = static_cast<RankTag>(v[0]);
  if (tag == RankTag::score) {
    s.score = get_f64(v, 1);
    return s;
  }
  if (tag == RankTag::state) {
    s.score = get_f64(v, pos);
    pos += 8;
  }
  const std::uint64_t deg = get_u64(v, pos);
  pos += 8;
  s.adjacency.reserve(deg);
  for (std::uint64_t i = 0; i < deg; ++i, pos += 8) s.adjacency.push_back(get_u64(v, pos));
  return s;
}

}  // namespace

Record rank_state_record(std::uint64_t vertex, const RankState& s) {
  return Record{u64_bytes(vertex), rank_adjacency_value(RankTag::state, s)};
}

RankState decode_rank_state(const Record& r) { return decode_rank_value(r.value); }

StepFns word_count_step() {
  StepFns fns;
  fns.map = [](const Record& r, MapContext& ctx) {
    const std::string& text = r.value;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j])) ++j;
      if (j > i) ctx.emit(text.substr(i, j - i), u64_bytes(1));
      i = j;
    }
  };
  fns.reduce = [](std::string_view key, std::span<const std::string_view> values,
                  ReduceContext& ctx) {
    std::uint64_t total = 0;
    for (auto v : values) total += get_u64(v);
    ctx.emit(std::string(key), u64_bytes(total));
  };
  return fns;
}

RmatDedupDriver::RmatDedupDriver(std::uint64_t seed, unsigned log_n, std::uint64_t total_edges,
                                 RmatParams params, std::uint32_t max_iterations)
    : seed_(seed), log_n_(log_n), params_(params), max_iterations_(max_iterations) {
  params_.validate();
  const unsigned __int128 n = static_cast<unsigned __int128>(1) << log_n;
  if (static_cast<unsigned __int128>(total_edges) > n * (n + 1) / 2)
    throw ConfigError("R-MAT edge count exceeds the number of distinct vertex pairs");
}

std::optional<StepFns> RmatDedupDriver::step(StepId t) {
  if (t.value == 0) return std::nullopt;
  const bool replay = duplicates_.count(t) != 0;
  if (!replay && done_) return std::nullopt;
  if (!replay && t.value > max_iterations_)
    throw ConfigError("R-MAT duplicate elimination did not terminate within " +
                      std::to_string(max_iterations_) + " iterations");
  StepFns fns;
  fns.map = [](const Record& r, MapContext& ctx) { ctx.emit(r); };
  fns.reduce = [seed = seed_, log_n = log_n_, params = params_](
                   std::string_view key, std::span<const std::string_view> values,
                   ReduceContext& ctx) {
    const std::string_view keep = *std::min_element(values.begin(), values.end());
    ctx.emit(std::string(key), std::string(keep));
    const std::uint64_t extra = values.size() - 1;
    if (extra == 0) return;
    ctx.add("duplicates", static_cast<double>(extra));
    const std::uint64_t base = mix_seed(mix_seed(seed, ctx.step().value), hash_key(key));
    for (std::uint64_t j = 1; j <= extra; ++j) {
      Rng rng(mix_seed(base, j));
      ctx.emit(rmat_record(rmat_edge(rng, log_n, params)));
    }
  };
  return fns;
}

void RmatDedupDriver::after_reduce(StepId t, const Aggregates& aggregates) {
  const double dups = aggregates.get("duplicates");
  duplicates_[t] = dups;
  if (dups == 0.0) done_ = true;
}

namespace {

std::vector<std::uint64_t> distinct_ids(std::span<const std::string_view> values) {
  std::vector<std::uint64_t> ids;
  ids.reserve(values.size());
  for (auto v : values) ids.push_back(get_u64(v));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace

// Edges are stored once, as (larger endpoint, smaller endpoint) or as a
// self-loop (v, v) marking a vertex that is the minimum of its neighbourhood.
StepFns large_star_step() {
  StepFns fns;
  fns.map = [](const Record& r, MapContext& ctx) {
    const Edge e = decode_edge(r);
    ctx.emit(edge_record(e.u, e.v));
    if (e.u != e.v) ctx.emit(edge_record(e.v, e.u));
  };
  // Connect every strictly larger neighbour to the minimum of the closed
  // neighbourhood.
  fns.reduce = [](std::string_view key, std::span<const std::string_view> values,
                  ReduceContext& ctx) {
    const std::uint64_t u = get_u64(key);
    const auto ids = distinct_ids(values);
    const bool self_loop = std::binary_search(ids.begin(), ids.end(), u);
    const std::uint64_t m = std::min(u, ids.front());
    bool has_larger = false;
    for (auto v : ids) {
      if (v <= u) continue;
      has_larger = true;
      ctx.emit(edge_record(v, m));
    }
    if (m == u) ctx.emit(edge_record(u, u));
    const bool changed = (m != u && has_larger) || (self_loop != (m == u));
    if (changed) ctx.add("changes", 1.0);
  };
  return fns;
}

StepFns small_star_step() {
  StepFns fns;
  fns.map = [](const Record& r, MapContext& ctx) {
    const Edge e = decode_edge(r);
    ctx.emit(edge_record(std::max(e.u, e.v), std::min(e.u, e.v)));
  };
  // Connect the vertex and all its smaller neighbours to their minimum.
  fns.reduce = [](std::string_view key, std::span<const std::string_view> values,
                  ReduceContext& ctx) {
    const std::uint64_t u = get_u64(key);
    const auto ids = distinct_ids(values);
    const bool self_loop = std::binary_search(ids.begin(), ids.end(), u);
    const std::uint64_t m = std::min(u, ids.front());
    bool changed = false;
    if (m == u) {
      ctx.emit(edge_record(u, u));
      changed = !self_loop;
    } else {
      ctx.emit(edge_record(u, m));
      std::size_t others = 0;
      for (auto w : ids) {
        if (w == u || w == m) continue;
        ctx.emit(edge_record(w, m));
        ++others;
      }
      changed = self_loop || others > 0;
    }
    if (changed) ctx.add("changes", 1.0);
  };
  return fns;
}

std::optional<StepFns> ConnectedComponentsDriver::step(StepId t) {
  if (t.value == 0) return std::nullopt;
  const bool replay = changes_.count(t) != 0;
  if (!replay && done_) return std::nullopt;
  if (!replay && t.value > 2 * max_rounds_)
    throw ConfigError("connected components did not converge within " +
                      std::to_string(max_rounds_) + " rounds");
  return t.value % 2 == 1 ? large_star_step() : small_star_step();
}

void ConnectedComponentsDriver::after_reduce(StepId t, const Aggregates& aggregates) {
  changes_[t] = aggregates.get("changes");
  if (t.value % 2 == 0 && changes_[t] == 0.0 && changes_[StepId(t.value - 1)] == 0.0)
    done_ = true;
}

std::optional<StepFns> PageRankDriver::step(StepId t) {
  if (t.value == 0 || t.value > iterations_) return std::nullopt;
  StepFns fns;
  fns.map = [](const Record& r, MapContext& ctx) {
    const RankState s = decode_rank_state(r);
    if (s.adjacency.empty()) {
      ctx.add("dangling", s.score);
    } else {
      const double share = s.score / static_cast<double>(s.adjacency.size());
      for (auto u : s.adjacency) ctx.emit(u64_bytes(u), rank_score_value(share));
    }
    ctx.emit(r.key, rank_adjacency_value(RankTag::adjacency, s));
  };
  fns.reduce = [n = static_cast<double>(n_), d = damping_](
                   std::string_view key, std::span<const std::string_view> values,
                   ReduceContext& ctx) {
    std::vector<double> incoming;
    RankState next;
    std::size_t adjacency_records = 0;
    for (auto v : values) {
      if (v.empty()) throw DecodeError(0, "empty rank record");
      if (static_cast<RankTag>(v[0]) == RankTag::score) {
        incoming.push_back(get_f64(v, 1));
      } else {
        next.adjacency = decode_rank_value(v).adjacency;
        ++adjacency_records;
      }
    }
    if (adjacency_records != 1)
      throw std::runtime_error("expected exactly one adjacency record per vertex");
    std::sort(incoming.begin(), incoming.end());
    double sum = 0.0;
    for (double x : incoming) sum += x;
    const double dangling = ctx.map_aggregates().get("dangling");
    next.score = (1.0 - d) / n + d * (sum + dangling / n);
    ctx.add("score_sum", next.score);
    ctx.add("states", 1.0);
    ctx.emit(rank_state_record(get_u64(key), next));
  };
  return fns;
}

void PageRankDriver::after_reduce(StepId t, const Aggregates& aggregates) {
  score_sums_[t] = aggregates.get("score_sum");
  state_counts_[t] = aggregates.get("states");
}

StepFns identity_step() {
  StepFns fns;
  fns.map = [](const Record& r, MapContext& ctx) { ctx.emit(r); };
  fns.reduce = [](std::string_view key, std::span<const std::string_view> values,
                  ReduceContext& ctx) {
    for (auto v : values) ctx.emit(std::string(key), std::string(v));
  };
  return fns;
}

std::string to_string(Benchmark b) {
  switch (b) {
    case Benchmark::wordcount: return "wordcount";
    case Benchmark::rmat: return "rmat";
    case Benchmark::cc: return "cc";
    case Benchmark::pagerank: return "pagerank";
    case Benchmark::uniform: return "uniform";
  }
  return "?";
}

Benchmark parse_benchmark(std::string_view s) {
  for (auto b : {Benchmark::wordcount, Benchmark::rmat, Benchmark::cc, Benchmark::pagerank,
                 Benchmark::uniform})
    if (s == to_string(b)) return b;
  throw ConfigError("unknown benchmark '" + std::string(s) + "'");
}

double BenchmarkParams::degree() const {
  if (avg_degree >= 0) return avg_degree;
  switch (benchmark) {
    case Benchmark::rmat: return 30.0;
    case Benchmark::cc: return 0.5;
    case Benchmark::pagerank: return 38.0;
    default: return 0.0;
  }
}

std::uint64_t BenchmarkParams::edges() const {
  const double n = static_cast<double>(vertices());
  const double m = benchmark == Benchmark::pagerank ? degree() * n : degree() * n / 2.0;
  return static_cast<std::uint64_t>(std::llround(m));
}

Workload make_workload(const BenchmarkParams& params) {
  if (params.pes == 0) throw ConfigError("number of PEs must be positive");
  Workload w;
  const auto p = params.pes;
  const auto seed = params.seed;
  switch (params.benchmark) {
    case Benchmark::wordcount: {
      auto dict = std::make_shared<std::vector<std::string>>(
          make_dictionary(seed, params.dictionary_size));
      const auto words = params.words_per_pe;
      w.source.generate = [dict, seed, words](PeId pe) {
        return gen_text(seed, pe, words, *dict);
      };
      w.make_driver = [] {
        return std::make_unique<StepListDriver>(std::vector<StepFns>{word_count_step()});
      };
      break;
    }
    case Benchmark::uniform: {
      const auto count = params.records_per_pe;
      w.source.generate = [seed, count](PeId pe) {
        Rng rng(mix_seed(seed, pe.value));
        std::vector<Record> out;
        out.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i)
          out.push_back(Record{u64_bytes(rng.next()), u64_bytes(i)});
        return out;
      };
      w.make_driver = [] {
        return std::make_unique<StepListDriver>(std::vector<StepFns>{identity_step()});
      };
      break;
    }
    case Benchmark::rmat: {
      const std::uint64_t n = params.vertices();
      if (n == 0 || !std::has_single_bit(n))
        throw ConfigError("R-MAT needs a power-of-two vertex count, got " + std::to_string(n));
      const unsigned log_n = static_cast<unsigned>(std::countr_zero(n));
      const std::uint64_t m = params.edges();
      const RmatParams rp = params.rmat;
      rp.validate();
      // Validates the edge count up front.
      RmatDedupDriver probe(seed, log_n, m, rp);
      w.source.generate = [seed, log_n, m, rp, p](PeId pe) {
        std::vector<Record> out;
        for (const auto& e : gen_rmat(seed, log_n, m, rp, p, pe)) out.push_back(rmat_record(e));
        return out;
      };
      w.make_driver = [seed, log_n, m, rp] {
        return std::make_unique<RmatDedupDriver>(seed, log_n, m, rp);
      };
      break;
    }
    case Benchmark::cc: {
      const std::uint64_t n = params.vertices();
      const std::uint64_t m = params.edges();
      w.source.generate = [seed, n, m, p](PeId pe) {
        std::vector<Record> out;
        const auto [lo, hi] = vertex_block(n, p, pe);
        for (std::uint64_t v = lo; v < hi; ++v) out.push_back(edge_record(v, v));
        for (const auto& e : gen_gnm(seed, n, m, p, pe)) out.push_back(edge_record(e.u, e.v));
        return out;
      };
      w.make_driver = [] { return std::make_unique<ConnectedComponentsDriver>(); };
      break;
    }
    case Benchmark::pagerank: {
      const std::uint64_t n = params.vertices();
      const std::uint64_t m = params.edges();
      w.source.generate = [seed, n, m, p](PeId pe) {
        const auto [lo, hi] = vertex_block(n, p, pe);
        std::vector<RankState> states(hi - lo);
        for (auto& s : states) s.score = 1.0 / static_cast<double>(n);
        for (const auto& e : gen_gnm(seed, n, m, p, pe)) states[e.u - lo].adjacency.push_back(e.v);
        std::vector<Record> out;
        out.reserve(states.size());
        for (std::uint64_t v = lo; v < hi; ++v) {
          auto& s = states[v - lo];
          std::sort(s.adjacency.begin(), s.adjacency.end());
          out.push_back(rank_state_record(v, s));
        }
        return out;
      };
      const auto iters = params.iterations;
      const double damping = params.damping;
      w.make_driver = [n, iters, damping] {
        return std::make_unique<PageRankDriver>(n, iters, damping);
      };
      break;
    }
  }
  return w;
}

}  // namespace ftmr::bench
