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

#include <doctest.h>

#include <algorithm>
#include <memory>
#include <random>
#include <set>

#include "ftmr/benchmarks.hpp"
#include "ftmr/engine.hpp"
#include "oracles.hpp"

using namespace ftmr;

namespace {

StepFns identity() { return bench::identity_step(); }

StepFns counting() {
  StepFns f;
  f.map = [](const Record& r, MapContext& ctx) { ctx.emit(r); };
  f.reduce = [](std::string_view k, std::span<const std::string_view> vs, ReduceContext& ctx) {
    std::uint64_t n = 0;
    for (auto v : vs) n += std::stoull(std::string(v));
    ctx.emit(std::string(k), std::to_string(n));
  };
  return f;
}

// Key whose hash lands in [lo, hi) of the p-way partition slot `slot`.
std::string key_in(std::uint32_t p, std::uint32_t slot, int start = 0) {
  const auto pm = initial_partition(p);
  for (int i = start;; ++i) {
    std::string k = "k" + std::to_string(i);
    if (pm.owner_of(hash_key(k)) == PeId(slot)) return k;
  }
}

std::vector<Record> uniform_keys(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<Record> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Record{u64_bytes(rng()), u64_bytes(i)});
  return out;
}

std::vector<Record> multiset(std::vector<Record> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Checks the per-barrier invariants of every shuffle.
struct BarrierChecker : EngineObserver {
  int barriers = 0;
  int recovery_points = 0;
  void on_barrier(StepId t, const Cluster& c) override {
    ++barriers;
    const auto& pm = c.partition();
    for (const auto& pe : c.pes()) {
      if (!pe.alive) continue;
      for (const auto& e : pe.inbox) CHECK(pm.owner_of(hash_key(e.record.key)) == pe.id);
    }
    const auto& hist = c.history().at(t);
    const auto& sm = c.metrics().steps.back();
    if (hist.backed_up) CHECK(sm.backup_bytes == sm.self_bytes);
    else CHECK(sm.backup_bytes == 0);
    if (!hist.backed_up || !c.groups().trivial()) return;
    ++recovery_points;
    // log completeness: peers' logs plus the backup shares rebuild the inbox
    for (const auto& d : c.pes()) {
      if (!d.alive) continue;
      std::vector<Record> rebuilt;
      for (const auto& s : c.pes()) {
        if (!s.alive) continue;
        if (s.id != d.id) {
          auto it = s.sent_log.find(t);
          if (it != s.sent_log.end()) {
            auto jt = it->second.find(d.id);
            if (jt != it->second.end()) rebuilt.insert(rebuilt.end(), jt->second.begin(), jt->second.end());
          }
        }
        auto bt = s.backup_store.find(t);
        if (bt == s.backup_store.end()) continue;
        for (const auto& [origin, recs] : bt->second)
          if (origin.first == d.id) rebuilt.insert(rebuilt.end(), recs.begin(), recs.end());
      }
      std::vector<Record> inbox;
      for (const auto& e : d.inbox) inbox.push_back(e.record);
      CHECK(multiset(rebuilt) == multiset(inbox));
    }
  }
};

}  // namespace

TEST_CASE("ingest holds the generated lists") {
  Cluster c(EngineConfig{.pes = 2});
  const std::vector<std::vector<Record>> in{{{"a", "1"}, {"b", "2"}}, {{"c", "3"}}};
  InputSource src{[&](PeId pe) { return in[pe.value]; }, true};
  ingest(c, src);
  CHECK(c.pe(PeId(0)).current == in[0]);
  CHECK(c.pe(PeId(1)).current == in[1]);
  CHECK(c.history().at(StepId(0)).recovery_point);
}

TEST_CASE("ingest is reproducible byte for byte") {
  const auto wl = bench::make_workload(bench::BenchmarkParams{.pes = 3, .seed = 9, .words_per_pe = 500});
  Cluster a(EngineConfig{.pes = 3}), b(EngineConfig{.pes = 3});
  ingest(a, wl.source);
  ingest(b, wl.source);
  for (std::uint32_t i = 0; i < 3; ++i)
    CHECK(encode_records(a.pe(PeId(i)).current) == encode_records(b.pe(PeId(i)).current));
}

TEST_CASE("map phase basics") {
  Cluster c(EngineConfig{.pes = 2});
  const std::vector<std::vector<Record>> in{{{"x", "1"}}, {{"y", "2"}, {"z", "3"}}};
  ingest(c, InputSource{[&](PeId pe) { return in[pe.value]; }, true});
  SUBCASE("identity leaves state unchanged") {
    map_phase(c, StepId(1), identity().map);
    CHECK(c.pe(PeId(0)).current == in[0]);
    CHECK(c.pe(PeId(1)).current == in[1]);
  }
  SUBCASE("dropping map empties all PEs") {
    map_phase(c, StepId(1), [](const Record&, MapContext&) {});
    CHECK(c.pe(PeId(0)).current.empty());
    CHECK(c.pe(PeId(1)).current.empty());
  }
}

TEST_CASE("word split map") {
  Cluster c(EngineConfig{.pes = 1});
  ingest(c, InputSource{[](PeId) { return std::vector<Record>{{u64_bytes(0), "a b"}}; }, true});
  map_phase(c, StepId(1), bench::word_count_step().map);
  const auto& cur = c.pe(PeId(0)).current;
  REQUIRE(cur.size() == 2);
  CHECK(cur[0].key == "a");
  CHECK(cur[1].key == "b");
}

TEST_CASE("p=1 shuffle stays local and disables backup") {
  Cluster c(EngineConfig{.pes = 1});
  ingest(c, InputSource{[](PeId) { return std::vector<Record>{{"a", "1"}, {"b", "2"}}; }, true});
  map_phase(c, StepId(1), identity().map);
  shuffle(c, StepId(1));
  const auto& sm = c.metrics().steps.back();
  CHECK(sm.network_bytes == 0);
  CHECK(sm.self_bytes == 4);
  CHECK(sm.backup_bytes == 0);
  CHECK(c.metrics().warnings.size() == 1);
  CHECK(c.pe(PeId(0)).inbox.size() == 2);
}

TEST_CASE("p=2 shuffle routes by hash range and logs every message") {
  const std::string lo = key_in(2, 0), hi = key_in(2, 1);
  Cluster c(EngineConfig{.pes = 2});
  ingest(c, InputSource{[&](PeId pe) {
                          return std::vector<Record>{{lo, "from" + std::to_string(pe.value)},
                                                     {hi, "from" + std::to_string(pe.value)}};
                        },
                        true});
  map_phase(c, StepId(1), identity().map);
  shuffle(c, StepId(1));
  for (std::uint32_t i = 0; i < 2; ++i) {
    const auto& pe = c.pe(PeId(i));
    REQUIRE(pe.inbox.size() == 2);
    for (const auto& e : pe.inbox) CHECK(e.record.key == (i == 0 ? lo : hi));
    const auto& log = pe.sent_log.at(StepId(1));
    CHECK(log.size() == 2);
    CHECK(log.at(PeId(0)).size() == 1);
    CHECK(log.at(PeId(1)).size() == 1);
  }
  const auto& sm = c.metrics().steps.back();
  CHECK(sm.network_bytes == sm.self_bytes);
  CHECK(sm.backup_bytes == sm.self_bytes);
  // PE 0's self-message is backed up on PE 1
  CHECK(c.pe(PeId(1)).backup_store.at(StepId(1)).count({PeId(0), 0}) == 1);
}

TEST_CASE("uniform keys: self volume is about 1/p of the total") {
  const std::uint32_t p = 16;
  Cluster c(EngineConfig{.pes = p});
  ingest(c, InputSource{[](PeId pe) { return uniform_keys(100 + pe.value, 6250); }, true});
  map_phase(c, StepId(1), identity().map);
  shuffle(c, StepId(1));
  const auto& sm = c.metrics().steps.back();
  const double frac = double(sm.self_bytes) / double(sm.self_bytes + sm.network_bytes);
  CHECK(frac >= 0.75 / p);
  CHECK(frac <= 1.25 / p);
}

TEST_CASE("reduce phase") {
  SUBCASE("counting reducer") {
    Aggregates aggs;
    std::vector<InboxEntry> in{{PeId(0), 0, {"a", "1"}}, {PeId(1), 0, {"a", "1"}}};
    const auto out = reduce_entries(in, counting().reduce, StepId(1), PeId(0), {}, aggs);
    CHECK(out == std::vector<Record>{{"a", "2"}});
  }
  SUBCASE("empty inbox") {
    Aggregates aggs;
    CHECK(reduce_entries({}, counting().reduce, StepId(1), PeId(0), {}, aggs).empty());
  }
  SUBCASE("arrival order does not matter") {
    // order-sensitive reducer: concatenates values as handed over
    const ReduceFn concat = [](std::string_view k, std::span<const std::string_view> vs,
                               ReduceContext& ctx) {
      std::string s;
      for (auto v : vs) s += std::string(v) + ",";
      ctx.emit(std::string(k), s);
    };
    std::vector<InboxEntry> in;
    for (std::uint32_t src = 0; src < 4; ++src)
      for (std::uint64_t seq = 0; seq < 5; ++seq)
        in.push_back({PeId(src), seq, {"k" + std::to_string(seq % 2), std::to_string(src * 10 + seq)}});
    Aggregates a0;
    const auto expected = reduce_entries(in, concat, StepId(1), PeId(0), {}, a0);
    std::mt19937 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(in.begin(), in.end(), rng);
      Aggregates a;
      CHECK(reduce_entries(in, concat, StepId(1), PeId(0), {}, a) == expected);
    }
  }
}

TEST_CASE("aggregates are summed in sorted order") {
  Aggregates a, b;
  a.add("x", 1e16);
  a.add("x", 1.0);
  b.add("x", -1e16);
  b.add("x", 1.0);
  Aggregates ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  CHECK(ab.get("x") == ba.get("x"));
  CHECK(ab.get("missing") == 0.0);
}

TEST_CASE("user function errors carry PE and step") {
  StepFns f = identity();
  f.map = [](const Record& r, MapContext&) {
    if (r.key == "bad") throw std::runtime_error("boom");
  };
  StepListDriver d({identity(), f});
  try {
    testutil::run_fixed(EngineConfig{.pes = 2}, d, {{{"ok", ""}}, {{"bad", ""}}});
    FAIL("expected JobError");
  } catch (const JobError& e) {
    CHECK(e.step() == StepId(2));
  }
}

TEST_CASE("log GC keeps the logs since the last recovery point") {
  auto run = [](std::uint32_t interval, std::uint32_t steps) {
    auto c = std::make_unique<Cluster>(EngineConfig{.pes = 4, .recovery_interval = interval});
    StepListDriver d(std::vector<StepFns>(steps, identity()));
    InputSource src{[](PeId pe) { return uniform_keys(pe.value, 300); }, true};
    run_job(*c, d, src);
    return c;
  };
  auto log_steps = [](const Cluster& c) {
    std::set<std::uint32_t> s;
    for (const auto& pe : c.pes()) {
      for (const auto& [t, _] : pe.sent_log) s.insert(t.value);
      for (const auto& [t, _] : pe.backup_store) s.insert(t.value);
    }
    return s;
  };
  SUBCASE("every step a recovery point") {
    const auto c = run(1, 3);
    CHECK(log_steps(*c) == std::set<std::uint32_t>{3});
    for (const auto& sm : c->metrics().steps)
      CHECK(sm.log_bytes == sm.network_bytes + sm.self_bytes + sm.backup_bytes);
  }
  SUBCASE("every third step") {
    CHECK(log_steps(*run(3, 2)) == std::set<std::uint32_t>{1, 2});
    CHECK(log_steps(*run(3, 3)) == std::set<std::uint32_t>{3});
    CHECK(log_steps(*run(3, 5)) == std::set<std::uint32_t>{3, 4, 5});
  }
  SUBCASE("input only keeps everything") {
    const auto c = run(0, 4);
    CHECK(log_steps(*c) == std::set<std::uint32_t>{1, 2, 3, 4});
    CHECK(c->metrics().backup_total() == 0);
  }
}

TEST_CASE("zero-step job returns the input") {
  StepListDriver d({});
  const std::vector<std::vector<Record>> in{{{"a", "1"}}, {{"b", "2"}}};
  const auto res = testutil::run_fixed(EngineConfig{.pes = 2}, d, in);
  CHECK(res.steps == 0);
  CHECK(res.outputs == in);
}

TEST_CASE("fault tolerance on and off give the same output and local work") {
  const bench::BenchmarkParams bp{.pes = 4, .seed = 3, .words_per_pe = 2000, .dictionary_size = 50};
  const auto wl = bench::make_workload(bp);
  auto run = [&](BackupMode m) {
    Cluster c(EngineConfig{.pes = 4, .backup = m});
    auto d = wl.make_driver();
    return run_job(c, *d, wl.source);
  };
  const auto on = run(BackupMode::split), off = run(BackupMode::off);
  CHECK(testutil::sorted(on.outputs) == testutil::sorted(off.outputs));
  CHECK(on.metrics.map_calls_total() == off.metrics.map_calls_total());
  CHECK(on.metrics.reduce_calls_total() == off.metrics.reduce_calls_total());
  CHECK(off.metrics.backup_total() == 0);
}

TEST_CASE("word count with one failure equals the fault-free run") {
  const auto wl = bench::make_workload(bench::BenchmarkParams{.pes = 4, .seed = 5, .words_per_pe = 1000});
  auto run = [&](std::vector<FailureEvent> f) {
    Cluster c(EngineConfig{.pes = 4});
    auto d = wl.make_driver();
    return run_job(c, *d, wl.source, f);
  };
  const auto ref = run({});
  const auto got = run({FailureEvent{StepId(1), {PeId(2)}}});
  CHECK(got.outputs[2].empty());
  CHECK(testutil::sorted(got.outputs) == testutil::sorted(ref.outputs));
  CHECK(got.metrics.recoveries.size() == 1);
}

TEST_CASE("barrier invariants hold across benchmarks and modes") {
  for (auto b : {bench::Benchmark::wordcount, bench::Benchmark::cc, bench::Benchmark::pagerank}) {
    for (auto mode : {BackupMode::split, BackupMode::single}) {
      for (std::uint32_t interval : {1u, 2u}) {
        bench::BenchmarkParams bp{.benchmark = b, .pes = 4, .seed = 2, .words_per_pe = 500,
                                  .vertices_per_pe = 32, .iterations = 4};
        const auto wl = bench::make_workload(bp);
        Cluster c(EngineConfig{.pes = 4, .backup = mode, .recovery_interval = interval});
        BarrierChecker chk;
        c.set_observer(&chk);
        auto d = wl.make_driver();
        const auto res = run_job(c, *d, wl.source, std::vector{FailureEvent{StepId(2), {PeId(1)}}});
        CHECK(chk.barriers == static_cast<int>(res.steps));
        if (res.steps >= interval) CHECK(chk.recovery_points > 0);
      }
    }
  }
}

TEST_CASE("metrics counters are additive") {
  const auto wl = bench::make_workload(bench::BenchmarkParams{.benchmark = bench::Benchmark::cc, .pes = 4, .vertices_per_pe = 64});
  Cluster c(EngineConfig{.pes = 4});
  auto d = wl.make_driver();
  const auto res = run_job(c, *d, wl.source);
  std::uint64_t net = 0, self = 0, backup = 0, recs = 0;
  for (const auto& sm : res.metrics.steps) {
    net += sm.network_bytes;
    self += sm.self_bytes;
    backup += sm.backup_bytes;
    recs += sm.records;
  }
  CHECK(net == res.metrics.network_total());
  CHECK(self == res.metrics.self_total());
  CHECK(backup == res.metrics.backup_total());
  CHECK(recs == res.metrics.records_total());
  CHECK(res.metrics.volume_total() == net + self);
}

TEST_CASE("backup only on recovery-point steps") {
  const auto wl = bench::make_workload(bench::BenchmarkParams{.benchmark = bench::Benchmark::pagerank, .pes = 4, .vertices_per_pe = 16, .iterations = 6});
  Cluster c(EngineConfig{.pes = 4, .recovery_interval = 3});
  auto d = wl.make_driver();
  const auto res = run_job(c, *d, wl.source);
  for (const auto& sm : res.metrics.steps) {
    CHECK(sm.recovery_point == (sm.step.value % 3 == 0));
    if (!sm.recovery_point) CHECK(sm.backup_bytes == 0);
    else CHECK(sm.backup_bytes == sm.self_bytes);
  }
}

TEST_CASE("failure plan validation") {
  StepListDriver d({identity()});
  const std::vector<std::vector<Record>> in{{{"a", ""}}, {{"b", ""}}, {{"c", ""}}};
  CHECK_THROWS_AS(testutil::run_fixed(EngineConfig{.pes = 3}, d, in, {FailureEvent{StepId(0), {PeId(1)}}}),
                  ConfigError);
  CHECK_THROWS_AS(testutil::run_fixed(EngineConfig{.pes = 3}, d, in, {FailureEvent{StepId(1), {PeId(7)}}}),
                  ConfigError);
  CHECK_THROWS_AS(testutil::run_fixed(EngineConfig{.pes = 3}, d, in,
                                      {FailureEvent{StepId(1), {PeId(1)}}, FailureEvent{StepId(2), {PeId(1)}}}),
                  ConfigError);
  CHECK_THROWS_AS(testutil::run_fixed(EngineConfig{.pes = 3}, d, in,
                                      {FailureEvent{StepId(2), {PeId(1)}}, FailureEvent{StepId(1), {PeId(2)}}}),
                  ConfigError);
}

TEST_CASE("events after the last step are reported") {
  StepListDriver d({identity()});
  const auto res = testutil::run_fixed(EngineConfig{.pes = 2}, d, {{{"a", ""}}, {{"b", ""}}},
                                       {FailureEvent{StepId(5), {PeId(1)}}});
  CHECK(res.metrics.warnings.size() == 1);
  CHECK(testutil::sorted(res.outputs).size() == 2);
}
