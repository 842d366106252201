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

#include "ftmr/engine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "ftmr/recovery.hpp"

namespace ftmr {

double Aggregates::get(const std::string& name) const {
  auto it = contributions_.find(name);
  if (it == contributions_.end()) return 0.0;
  std::vector<double> sorted = it->second;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  return sum;
}

void Aggregates::merge(const Aggregates& other) {
  for (const auto& [name, values] : other.contributions_) {
    auto& dst = contributions_[name];
    dst.insert(dst.end(), values.begin(), values.end());
  }
}

std::optional<StepFns> StepListDriver::step(StepId t) {
  if (t.value == 0 || t.value > steps_.size()) return std::nullopt;
  return steps_[t.value - 1];
}

StepPlan plan_for(const EngineConfig& cfg, StepId t) {
  StepPlan p;
  p.step = t;
  p.is_recovery_point =
      t.value == 0 || (cfg.recovery_interval != 0 && t.value % cfg.recovery_interval == 0);
  return p;
}

StepId last_recovery_point(const EngineConfig& cfg, StepId t) {
  if (cfg.recovery_interval == 0) return StepId(0);
  return StepId(t.value - t.value % cfg.recovery_interval);
}

namespace {

std::uint64_t bytes_of(const std::vector<Record>& records) {
  std::uint64_t n = 0;
  for (const auto& r : records) n += record_size(r);
  return n;
}

}  // namespace

std::uint64_t PeState::log_bytes() const {
  std::uint64_t n = 0;
  for (const auto& [step, by_dst] : sent_log)
    for (const auto& [dst, recs] : by_dst) n += bytes_of(recs);
  for (const auto& [step, shares] : backup_store)
    for (const auto& [key, recs] : shares) n += bytes_of(recs);
  return n;
}

Cluster::Cluster(EngineConfig cfg) : cfg_(cfg) {
  if (cfg_.pes == 0) throw ConfigError("number of PEs must be positive");
  groups_ = GroupMap::blocks(cfg_.pes, cfg_.group_size == 0 ? 1 : cfg_.group_size);
  pm_ = initial_partition(cfg_.pes);
  pes_.resize(cfg_.pes);
  for (std::uint32_t i = 0; i < cfg_.pes; ++i) pes_[i].id = PeId(i);
}

std::vector<PeId> Cluster::live() const {
  std::vector<PeId> out;
  for (const auto& pe : pes_)
    if (pe.alive) out.push_back(pe.id);
  return out;
}

void Cluster::warn(const std::string& msg) {
  auto& w = metrics_.warnings;
  if (std::find(w.begin(), w.end(), msg) == w.end()) w.push_back(msg);
}

std::uint64_t Cluster::log_bytes() const {
  std::uint64_t n = 0;
  for (const auto& pe : pes_)
    if (pe.alive) n += pe.log_bytes();
  return n;
}

void ingest(Cluster& c, const InputSource& source) {
  for (auto& pe : c.pes()) {
    if (!pe.alive) continue;
    pe.current = source.generate(pe.id);
    pe.inbox.clear();
  }
  StepHistory h;
  h.step = StepId(0);
  h.recovery_point = true;
  h.partition = c.partition();
  c.history()[StepId(0)] = std::move(h);
}

std::vector<Record> map_records(const std::vector<Record>& in, const MapFn& fn, StepId t,
                                PeId pe, Aggregates& aggregates, std::uint64_t* calls) {
  std::vector<Record> out;
  out.reserve(in.size());
  MapContext ctx(t, out, aggregates);
  for (std::size_t i = 0; i < in.size(); ++i) {
    try {
      fn(in[i], ctx);
    } catch (const JobError&) {
      throw;
    } catch (const std::exception& e) {
      throw JobError(pe, t, "map of record " + std::to_string(i), e.what());
    }
  }
  if (calls != nullptr) *calls += in.size();
  return out;
}

void map_phase(Cluster& c, StepId t, const MapFn& fn) {
  Aggregates aggregates;
  std::uint64_t calls = 0;
  for (auto& pe : c.pes()) {
    if (!pe.alive) continue;
    pe.current = map_records(pe.current, fn, t, pe.id, aggregates, &calls);
  }
  StepHistory h;
  h.step = t;
  h.map_aggregates = std::move(aggregates);
  c.history()[t] = std::move(h);

  auto& steps = c.metrics().steps;
  StepMetrics sm;
  sm.step = t;
  sm.map_calls = calls;
  sm.backup_received.assign(c.config().pes, 0);
  steps.push_back(std::move(sm));
}

void shuffle(Cluster& c, StepId t) {
  const auto& cfg = c.config();
  const auto live = c.live();
  const PartitionMap& pm = c.partition();
  const GroupMap* groups = c.groups().trivial() ? nullptr : &c.groups();

  StepHistory& hist = c.history()[t];
  hist.step = t;
  hist.partition = pm;
  hist.recovery_point = plan_for(cfg, t).is_recovery_point;

  bool backup = hist.recovery_point && cfg.backup != BackupMode::off;
  if (backup && live.size() < 2) {
    c.warn("backup disabled: fewer than two live PEs");
    backup = false;
  }
  std::map<PeId, std::vector<PeId>> targets;
  if (backup) {
    try {
      for (PeId i : live) targets[i] = backup_targets(i, live, cfg.backup, cfg.pes, groups);
    } catch (const ConfigError&) {
      c.warn("backup disabled: all live PEs share one failure group");
      backup = false;
      targets.clear();
    }
  }
  hist.backed_up = backup;

  if (c.metrics().steps.empty() || c.metrics().steps.back().step != t) {
    StepMetrics sm;
    sm.step = t;
    sm.backup_received.assign(cfg.pes, 0);
    c.metrics().steps.push_back(std::move(sm));
  }
  StepMetrics& sm = c.metrics().steps.back();
  sm.recovery_point = hist.recovery_point;
  auto& max_rec = c.metrics().max_record_size;
  EngineObserver* obs = c.observer();

  const bool logging = cfg.backup != BackupMode::off;
  for (PeId i : live) {
    PeState& src = c.pe(i);
    std::vector<Record> self_message;
    std::uint64_t seq = 0;
    for (auto& rec : src.current) {
      const PeId dst = pm.owner_of(hash_key(rec.key));
      const std::uint64_t size = record_size(rec);
      max_rec = std::max(max_rec, size);
      ++sm.records;
      if (dst != i) sm.network_bytes += size;
      const bool logical_self = dst == i || (groups != nullptr && groups->same_group(dst, i));
      if (logical_self) {
        sm.self_bytes += size;
        if (backup) self_message.push_back(rec);
      }
      if (logging) src.sent_log[t][dst].push_back(rec);
      if (obs != nullptr) obs->on_delivery(t, dst, rec, Generation::original);
      c.pe(dst).inbox.push_back(InboxEntry{i, seq++, std::move(rec)});
    }
    src.current.clear();

    if (!backup) continue;
    const auto& tg = targets.at(i);
    auto shares = split_self_message(self_message, tg);
    std::uint64_t origin_total = 0, origin_max = 0;
    for (std::uint32_t s = 0; s < shares.size(); ++s) {
      auto& [holder, recs] = shares[s];
      const std::uint64_t bytes = bytes_of(recs);
      sm.backup_bytes += bytes;
      sm.backup_received[holder.value] += bytes;
      origin_total += bytes;
      origin_max = std::max(origin_max, bytes);
      c.pe(holder).backup_store[t][{i, s}] = std::move(recs);
    }
    if (origin_total > 0)
      sm.max_origin_concentration =
          std::max(sm.max_origin_concentration,
                   static_cast<double>(origin_max) / static_cast<double>(origin_total));
  }
  hist.backup_targets = std::move(targets);
}

std::vector<Record> reduce_entries(std::vector<InboxEntry> entries, const ReduceFn& fn, StepId t,
                                   PeId pe, const Aggregates& map_aggregates,
                                   Aggregates& aggregates, std::uint64_t* calls) {
  std::vector<std::uint32_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    const InboxEntry& a = entries[x];
    const InboxEntry& b = entries[y];
    if (const int k = a.record.key.compare(b.record.key); k != 0) return k < 0;
    if (a.src != b.src) return a.src < b.src;
    return a.seq < b.seq;
  });
  std::vector<Record> out;
  ReduceContext ctx(t, out, aggregates, map_aggregates);
  std::vector<std::string_view> values;
  std::size_t i = 0;
  while (i < order.size()) {
    const std::string& key = entries[order[i]].record.key;
    std::size_t j = i;
    values.clear();
    while (j < order.size() && entries[order[j]].record.key == key) {
      values.push_back(entries[order[j]].record.value);
      ++j;
    }
    try {
      fn(key, values, ctx);
    } catch (const JobError&) {
      throw;
    } catch (const std::exception& e) {
      throw JobError(pe, t, "reduce of key '" + key + "'", e.what());
    }
    if (calls != nullptr) ++*calls;
    i = j;
  }
  return out;
}

Aggregates reduce_phase(Cluster& c, StepId t, const ReduceFn& fn) {
  Aggregates aggregates;
  const Aggregates empty;
  auto it = c.history().find(t);
  const Aggregates& map_aggs = it == c.history().end() ? empty : it->second.map_aggregates;
  std::uint64_t calls = 0;
  for (auto& pe : c.pes()) {
    if (!pe.alive) continue;
    pe.current = reduce_entries(std::move(pe.inbox), fn, t, pe.id, map_aggs, aggregates, &calls);
    pe.inbox.clear();
  }
  if (!c.metrics().steps.empty() && c.metrics().steps.back().step == t)
    c.metrics().steps.back().reduce_calls += calls;
  return aggregates;
}

void gc_logs(Cluster& c, StepId completed) {
  const StepId keep_from = last_recovery_point(c.config(), completed);
  for (auto& pe : c.pes()) {
    if (!pe.alive) continue;
    pe.sent_log.erase(pe.sent_log.begin(), pe.sent_log.lower_bound(keep_from));
    pe.backup_store.erase(pe.backup_store.begin(), pe.backup_store.lower_bound(keep_from));
  }
  auto& hist = c.history();
  hist.erase(hist.begin(), hist.lower_bound(keep_from));
  if (!c.metrics().steps.empty() && c.metrics().steps.back().step == completed)
    c.metrics().steps.back().log_bytes = c.log_bytes();
}

namespace {

void validate_failures(const Cluster& c, std::span<const FailureEvent> failures) {
  std::set<PeId> dead;
  StepId prev(0);
  for (const auto& ev : failures) {
    if (ev.step.value == 0) throw ConfigError("failure events fire at shuffle barriers (step >= 1)");
    if (ev.step <= prev) throw ConfigError("failure events must be strictly ordered by step");
    prev = ev.step;
    for (PeId pe : ev.failed) {
      if (pe.value >= c.config().pes)
        throw ConfigError("failure targets unknown PE " + std::to_string(pe.value));
      if (!dead.insert(pe).second)
        throw ConfigError("failure targets already-dead PE " + std::to_string(pe.value));
    }
  }
}

}  // namespace

JobResult run_job(Cluster& c, JobDriver& driver, const InputSource& source,
                  std::span<const FailureEvent> failures) {
  validate_failures(c, failures);
  ingest(c, source);
  std::size_t next_event = 0;
  StepId t(1);
  for (;; t = t.next()) {
    auto fns = driver.step(t);
    if (!fns) break;
    map_phase(c, t, fns->map);
    shuffle(c, t);
    if (c.observer() != nullptr) c.observer()->on_barrier(t, c);
    if (next_event < failures.size() && failures[next_event].step == t) {
      recover(c, failures[next_event], driver, source);
      ++next_event;
    }
    const Aggregates aggs = reduce_phase(c, t, fns->reduce);
    gc_logs(c, t);
    driver.after_reduce(t, aggs);
  }
  for (; next_event < failures.size(); ++next_event)
    c.warn("failure event at step " + std::to_string(failures[next_event].step.value) +
           " never fired: job finished after " + std::to_string(t.value - 1) + " steps");

  JobResult result;
  result.steps = t.value - 1;
  result.outputs.resize(c.pes().size());
  for (auto& pe : c.pes())
    if (pe.alive) result.outputs[pe.id.value] = pe.current;
  result.metrics = c.metrics();
  result.partition = c.partition();
  return result;
}

}  // namespace ftmr
