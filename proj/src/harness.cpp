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

#include "ftmr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "ftmr/benchmarks.hpp"

namespace ftmr {

FailurePlan FailurePlan::generate(std::uint64_t seed, std::uint32_t pes,
                                  std::uint32_t pes_per_node, double fraction,
                                  std::uint32_t steps) {
  if (pes == 0 || pes_per_node == 0 || pes % pes_per_node != 0)
    throw ConfigError("pes_per_node must divide pes");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("failure fraction must be in (0, 1]");
  const std::uint32_t nodes = pes / pes_per_node;
  const auto count = static_cast<std::uint32_t>(std::llround(fraction * nodes));
  FailurePlan plan;
  if (count == 0) return plan;
  if (count >= nodes) throw ConfigError("failure fraction would fail every node");
  if (count > steps)
    throw ConfigError("cannot place " + std::to_string(count) + " failures at distinct steps of a " +
                      std::to_string(steps) + "-step job");

  bench::Rng rng(bench::mix_seed(seed, 0x6661696cULL));
  std::vector<std::uint32_t> node_ids(nodes);
  std::iota(node_ids.begin(), node_ids.end(), 0u);
  std::vector<std::uint32_t> step_ids(steps);
  std::iota(step_ids.begin(), step_ids.end(), 1u);
  // partial Fisher-Yates
  for (std::uint32_t i = 0; i < count; ++i) {
    std::swap(node_ids[i], node_ids[i + rng.below(nodes - i)]);
    std::swap(step_ids[i], step_ids[i + rng.below(steps - i)]);
  }
  std::sort(step_ids.begin(), step_ids.begin() + count);
  for (std::uint32_t i = 0; i < count; ++i) {
    FailureEvent ev;
    ev.step = StepId(step_ids[i]);
    for (std::uint32_t k = 0; k < pes_per_node; ++k)
      ev.failed.push_back(PeId(node_ids[i] * pes_per_node + k));
    plan.events.push_back(std::move(ev));
  }
  return plan;
}

JobResult run_once(const JobConfig& cfg, std::span<const FailureEvent> events,
                   EngineObserver* observer) {
  const auto workload = bench::make_workload(cfg.benchmark_params());
  auto driver = workload.make_driver();
  Cluster cluster(cfg.engine_config());
  cluster.set_observer(observer);
  return run_job(cluster, *driver, workload.source, events);
}

SimulationResult run_simulation(const JobConfig& cfg) {
  cfg.validate();
  SimulationResult res;
  if (cfg.failures.empty() && !cfg.fail_fraction) {
    res.job = run_once(cfg, {});
    return res;
  }
  DeliveryLedger shadow;
  const JobResult fault_free = run_once(cfg, {}, &shadow);
  if (cfg.fail_fraction) {
    res.events = FailurePlan::generate(cfg.seed, cfg.pes, cfg.pes_per_node, *cfg.fail_fraction,
                                       fault_free.steps)
                     .events;
  } else {
    res.events = cfg.failures;
  }
  DeliveryLedger ledger;
  res.job = run_once(cfg, res.events, &ledger);
  res.ledger = ledger.compare(shadow);
  res.ledger_checked = true;
  return res;
}

std::vector<Record> flatten(const Outputs& outputs) {
  std::vector<Record> all;
  for (const auto& out : outputs) all.insert(all.end(), out.begin(), out.end());
  std::sort(all.begin(), all.end());
  return all;
}

OutputComparison compare_outputs(bench::Benchmark b, const Outputs& got, const Outputs& expected,
                                 double tolerance) {
  OutputComparison cmp;
  const auto a = flatten(got);
  const auto e = flatten(expected);
  if (a.size() != e.size()) {
    cmp.equal = false;
    cmp.detail = std::to_string(a.size()) + " output records, expected " + std::to_string(e.size());
    return cmp;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b == bench::Benchmark::pagerank) {
      if (a[i].key != e[i].key) {
        cmp.equal = false;
        cmp.detail = "vertex sets differ";
        return cmp;
      }
      const auto sa = bench::decode_rank_state(a[i]);
      const auto se = bench::decode_rank_state(e[i]);
      if (sa.adjacency != se.adjacency) {
        cmp.equal = false;
        cmp.detail = "adjacency differs at vertex " + std::to_string(get_u64(a[i].key));
        return cmp;
      }
      const double dev = std::fabs(sa.score - se.score);
      if (!(dev <= tolerance)) {
        cmp.equal = false;
        if (cmp.detail.empty())
          cmp.detail = "score deviates at vertex " + std::to_string(get_u64(a[i].key));
      }
      if (std::isnan(dev)) cmp.max_deviation = std::numeric_limits<double>::infinity();
      cmp.max_deviation = std::max(cmp.max_deviation, dev);
    } else if (!(a[i] == e[i])) {
      cmp.equal = false;
      cmp.detail = "output multisets differ at sorted position " + std::to_string(i);
      return cmp;
    }
  }
  return cmp;
}

std::string SweepReport::summary() const {
  return std::to_string(passed) + "/" + std::to_string(total) + " passed";
}

SweepReport sweep_failures(const JobConfig& base, double tolerance, bool split_only) {
  JobConfig cfg = base;
  cfg.failures.clear();
  cfg.fail_fraction.reset();
  if (cfg.pes > kSweepMaxPes)
    throw ConfigError("sweep is limited to " + std::to_string(kSweepMaxPes) + " PEs, got " +
                      std::to_string(cfg.pes));
  if (cfg.pes < 2) throw ConfigError("sweep needs at least 2 PEs");
  cfg.backup_mode = BackupMode::split;
  cfg.validate();

  DeliveryLedger shadow;
  const JobResult oracle = run_once(cfg, {}, &shadow);

  SweepReport rep;
  rep.steps = oracle.steps;
  const std::uint32_t unit = cfg.groups > 1 ? cfg.groups : 1;
  for (std::uint32_t first = 0; first < cfg.pes; first += unit) {
    std::vector<PeId> failed;
    for (std::uint32_t k = 0; k < unit; ++k) failed.push_back(PeId(first + k));
    for (std::uint32_t s = 1; s <= oracle.steps; ++s) {
      ++rep.total;
      bool ok = true;
      for (BackupMode mode : {BackupMode::split, BackupMode::single}) {
        if (split_only && mode != BackupMode::split) continue;
        JobConfig run = cfg;
        run.backup_mode = mode;
        const FailureEvent ev{StepId(s), failed};
        SweepCase sc{failed, StepId(s), mode, {}};
        try {
          DeliveryLedger ledger;
          const JobResult res = run_once(run, std::span(&ev, 1), &ledger);
          const auto cmp = compare_outputs(cfg.benchmark, res.outputs, oracle.outputs, tolerance);
          rep.max_deviation = std::max(rep.max_deviation, cmp.max_deviation);
          const auto lr = ledger.compare(shadow);
          if (!cmp.equal) sc.detail = cmp.detail;
          else if (!lr.exactly_once) sc.detail = lr.detail;
        } catch (const std::exception& e) {
          sc.detail = e.what();
        }
        if (!sc.detail.empty()) {
          ok = false;
          rep.counterexamples.push_back(std::move(sc));
        }
      }
      if (ok) ++rep.passed;
    }
  }
  return rep;
}

OverheadStats measure_overhead(const JobConfig& base, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("overhead needs at least one seed");
  if (base.pes < 2) throw ConfigError("overhead needs at least 2 PEs");
  OverheadStats st;
  st.pes = base.pes;
  st.reference = 1.0 / (base.pes - 1);
  st.min_ratio = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (auto seed : seeds) {
    JobConfig cfg = base;
    cfg.seed = seed;
    cfg.failures.clear();
    cfg.fail_fraction.reset();
    cfg.validate();
    const JobResult res = run_once(cfg, {});
    const double r = res.metrics.overhead_ratio();
    sum += r;
    st.min_ratio = std::min(st.min_ratio, r);
    st.max_ratio = std::max(st.max_ratio, r);
    st.max_imbalance = std::max(st.max_imbalance, res.metrics.backup_imbalance());
    for (const auto& sm : res.metrics.steps)
      st.max_concentration = std::max(st.max_concentration, sm.max_origin_concentration);
    st.network_bytes += res.metrics.network_total();
    st.backup_bytes += res.metrics.backup_total();
    ++st.runs;
  }
  st.mean_ratio = sum / static_cast<double>(st.runs);
  return st;
}

void dump_outputs(const Outputs& outputs, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t pe = 0; pe < outputs.size(); ++pe) {
    std::ofstream out(std::filesystem::path(dir) / ("pe" + std::to_string(pe) + ".out"),
                      std::ios::binary);
    if (!out) throw ConfigError("cannot write to " + dir);
    out << encode_records(outputs[pe]);
  }
}

}  // namespace ftmr
