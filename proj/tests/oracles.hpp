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

// Sequential reference implementations used as test oracles. None of them
// goes through the engine.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ftmr/benchmarks.hpp"
#include "ftmr/engine.hpp"

namespace oracle {

inline std::map<std::string, std::uint64_t> word_count(const std::vector<std::string>& lines) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& line : lines) {
    std::string word;
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        if (!word.empty()) ++counts[word];
        word.clear();
      } else {
        word += c;
      }
    }
    if (!word.empty()) ++counts[word];
  }
  return counts;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;  // root is always the smallest id
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Component representative (minimum vertex id) of every vertex.
inline std::vector<std::uint64_t> components(std::size_t n,
                                             const std::vector<ftmr::bench::Edge>& edges) {
  UnionFind uf(n);
  for (const auto& e : edges) uf.unite(e.u, e.v);
  std::vector<std::uint64_t> rep(n);
  for (std::size_t v = 0; v < n; ++v) rep[v] = uf.find(v);
  return rep;
}

/// Dense power iteration: x' = (1-d)/n + d * (A^T D^-1 x + dangling/n).
inline std::vector<double> pagerank(const std::vector<std::vector<std::uint64_t>>& adj,
                                    unsigned iterations, double d = 0.85) {
  const std::size_t n = adj.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));  // m[dst][src]
  std::vector<bool> dangling(n, false);
  for (std::size_t u = 0; u < n; ++u) {
    if (adj[u].empty()) dangling[u] = true;
    for (auto v : adj[u]) m[v][u] += 1.0 / static_cast<double>(adj[u].size());
  }
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  for (unsigned it = 0; it < iterations; ++it) {
    double dmass = 0.0;
    for (std::size_t u = 0; u < n; ++u)
      if (dangling[u]) dmass += x[u];
    std::vector<double> y(n);
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::size_t u = 0; u < n; ++u) s += m[v][u] * x[u];
      y[v] = (1.0 - d) / static_cast<double>(n) + d * (s + dmass / static_cast<double>(n));
    }
    x = std::move(y);
  }
  return x;
}

inline std::uint64_t le64(const std::string& s) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s.at(i));
  return v;
}

}  // namespace oracle

namespace testutil {

/// Runs `driver` over a fixed per-PE input.
inline ftmr::JobResult run_fixed(ftmr::EngineConfig cfg, ftmr::JobDriver& driver,
                                 std::vector<std::vector<ftmr::Record>> input,
                                 std::vector<ftmr::FailureEvent> failures = {},
                                 ftmr::EngineObserver* obs = nullptr) {
  ftmr::InputSource src;
  src.generate = [input](ftmr::PeId pe) {
    return pe.value < input.size() ? input[pe.value] : std::vector<ftmr::Record>{};
  };
  ftmr::Cluster c(cfg);
  c.set_observer(obs);
  return ftmr::run_job(c, driver, src, failures);
}

inline std::vector<ftmr::Record> sorted(std::vector<std::vector<ftmr::Record>> outs) {
  std::vector<ftmr::Record> all;
  for (auto& o : outs) all.insert(all.end(), o.begin(), o.end());
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace testutil
