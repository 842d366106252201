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
#include <span>
#include <string>
#include <vector>

#include "ftmr/config.hpp"
#include "ftmr/engine.hpp"
#include "ftmr/ledger.hpp"

namespace ftmr {

/// Failure schedule of one run.
struct FailurePlan {
  std::vector<FailureEvent> events;

  /// Fails round(fraction * nodes) distinct nodes (pes / pes_per_node of
  /// them) at distinct steps drawn from [1, steps]. A node failure takes all
  /// its PEs down together. Throws ConfigError if there are fewer steps than
  /// failing nodes or if every node would fail.
  static FailurePlan generate(std::uint64_t seed, std::uint32_t pes, std::uint32_t pes_per_node,
                              double fraction, std::uint32_t steps);
};

struct SimulationResult {
  JobResult job;
  std::vector<FailureEvent> events;
  /// Only filled when failures were injected.
  bool ledger_checked = false;
  LedgerReport ledger;
};

/// Runs one job, with no observer beyond the optional ledger.
JobResult run_once(const JobConfig& cfg, std::span<const FailureEvent> events,
                   EngineObserver* observer = nullptr);

/// Runs the configured job. With failures, a fault-free shadow run provides
/// the step count for generated plans and the delivery ledger oracle.
SimulationResult run_simulation(const JobConfig& cfg);

struct OutputComparison {
  bool equal = true;
  /// Largest per-vertex score difference (PageRank only).
  double max_deviation = 0.0;
  std::string detail;
};

using Outputs = std::vector<std::vector<Record>>;

/// Multiset equality of the union of all outputs. For PageRank the scores
/// are compared with an absolute tolerance and everything else exactly.
OutputComparison compare_outputs(bench::Benchmark b, const Outputs& got, const Outputs& expected,
                                 double tolerance = 1e-12);

/// All output records, sorted.
std::vector<Record> flatten(const Outputs& outputs);

struct SweepCase {
  std::vector<PeId> failed;
  StepId step;
  BackupMode mode = BackupMode::split;
  std::string detail;
};

struct SweepReport {
  std::uint32_t total = 0;
  std::uint32_t passed = 0;
  std::uint32_t steps = 0;
  double max_deviation = 0.0;
  std::vector<SweepCase> counterexamples;
  std::string summary() const;
};

/// Fails each PE (each group when groups > 1) at each step of the fault-free
/// run, under both split and single backup, and checks output and delivery
/// ledger against the fault-free run. A combination passes when both modes
/// do. `split_only` skips the single-mode runs. Explicit failures in `cfg`
/// are ignored. Limited to 16 PEs.
SweepReport sweep_failures(const JobConfig& cfg, double tolerance = 1e-12, bool split_only = false);

inline constexpr std::uint32_t kSweepMaxPes = 16;

struct OverheadStats {
  std::uint32_t pes = 0;
  std::size_t runs = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double reference = 0.0;  // 1 / (p - 1)
  double max_imbalance = 0.0;
  double max_concentration = 0.0;
  std::uint64_t network_bytes = 0;
  std::uint64_t backup_bytes = 0;
};

/// Fault-free runs of `cfg` for each seed, measuring backup / network.
OverheadStats measure_overhead(const JobConfig& cfg, std::span<const std::uint64_t> seeds);

/// Writes `pe<id>.out` per PE holding its records in the wire format.
void dump_outputs(const Outputs& outputs, const std::string& dir);

}  // namespace ftmr
