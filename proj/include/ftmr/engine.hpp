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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftmr/core.hpp"
#include "ftmr/metrics.hpp"
#include "ftmr/partition.hpp"

namespace ftmr {

/// Named global sums. Each contribution is kept and the sum is taken over the
/// contributions in ascending order, so the result is independent of which
/// PE contributed what. Recovery moves work between PEs; this keeps
/// floating-point aggregates bit-identical to the fault-free run.
class Aggregates {
 public:
  void add(const std::string& name, double v) { contributions_[name].push_back(v); }
  double get(const std::string& name) const;
  void merge(const Aggregates& other);
  bool empty() const { return contributions_.empty(); }

 private:
  std::map<std::string, std::vector<double>> contributions_;
};

class MapContext {
 public:
  MapContext(StepId step, std::vector<Record>& out, Aggregates& aggregates)
      : step_(step), out_(&out), aggregates_(&aggregates) {}

  void emit(Record r) { out_->push_back(std::move(r)); }
  void emit(std::string key, std::string value) {
    out_->push_back(Record{std::move(key), std::move(value)});
  }
  /// Contributes to a map-phase aggregate, visible to this step's reducers.
  void add(const std::string& name, double v) { aggregates_->add(name, v); }
  StepId step() const { return step_; }

 private:
  StepId step_;
  std::vector<Record>* out_;
  Aggregates* aggregates_;
};

class ReduceContext {
 public:
  ReduceContext(StepId step, std::vector<Record>& out, Aggregates& aggregates,
                const Aggregates& map_aggregates)
      : step_(step), out_(&out), aggregates_(&aggregates), map_aggregates_(&map_aggregates) {}

  void emit(Record r) { out_->push_back(std::move(r)); }
  void emit(std::string key, std::string value) {
    out_->push_back(Record{std::move(key), std::move(value)});
  }
  /// Contributes to a reduce-phase aggregate, handed to JobDriver::after_reduce.
  void add(const std::string& name, double v) { aggregates_->add(name, v); }
  /// Global aggregates of this step's map phase.
  const Aggregates& map_aggregates() const { return *map_aggregates_; }
  StepId step() const { return step_; }

 private:
  StepId step_;
  std::vector<Record>* out_;
  Aggregates* aggregates_;
  const Aggregates* map_aggregates_;
};

/// User functions must be pure and deterministic: recovery re-executes them
/// on other PEs and relies on getting the same records back. Reducers must
/// not depend on the order of `values` beyond the documented stable order.
using MapFn = std::function<void(const Record&, MapContext&)>;
using ReduceFn =
    std::function<void(std::string_view key, std::span<const std::string_view> values,
                       ReduceContext&)>;

struct StepFns {
  MapFn map;
  ReduceFn reduce;
};

/// Supplies the functions of each step. Iterative jobs decide termination
/// from the aggregates passed to after_reduce.
class JobDriver {
 public:
  virtual ~JobDriver() = default;
  /// Functions for step t (t >= 1), or nullopt when the job is complete.
  /// For steps already executed this must return the same functions again.
  virtual std::optional<StepFns> step(StepId t) = 0;
  virtual void after_reduce(StepId /*t*/, const Aggregates& /*reduce_aggregates*/) {}
};

/// Fixed sequence of steps.
class StepListDriver : public JobDriver {
 public:
  explicit StepListDriver(std::vector<StepFns> steps) : steps_(std::move(steps)) {}
  std::optional<StepFns> step(StepId t) override;

 private:
  std::vector<StepFns> steps_;
};

/// Per-PE input generator. Must be replayable: calling it twice for the same
/// PE yields the same records.
struct InputSource {
  std::function<std::vector<Record>(PeId)> generate;
  bool replayable = true;
};

struct EngineConfig {
  std::uint32_t pes = 1;
  BackupMode backup = BackupMode::split;
  /// Every interval-th shuffle is a recovery point; 0 means only the input
  /// (step 0) is one.
  std::uint32_t recovery_interval = 1;
  /// Failure-group size; 1 disables group-aware backup.
  std::uint32_t group_size = 1;
  /// Funnel recovery through one survivor instead of all of them.
  bool single_recoverer = false;
};

struct StepPlan {
  StepId step;
  bool is_recovery_point = false;
};

StepPlan plan_for(const EngineConfig& cfg, StepId t);

/// Latest recovery point at or before t.
StepId last_recovery_point(const EngineConfig& cfg, StepId t);

enum class Generation { original, recovery };

struct InboxEntry {
  PeId src;
  std::uint64_t seq = 0;
  Record record;
};

using SentLog = std::map<StepId, std::map<PeId, std::vector<Record>>>;
/// step -> (origin PE, share index) -> records.
using BackupStore = std::map<StepId, std::map<std::pair<PeId, std::uint32_t>, std::vector<Record>>>;

struct PeState {
  PeId id;
  bool alive = true;
  StepId died_at;  // meaningful only when !alive
  std::vector<Record> current;  // output of the last Map (pre-shuffle) or Reduce
  std::vector<InboxEntry> inbox;
  SentLog sent_log;
  BackupStore backup_store;

  std::uint64_t log_bytes() const;
};

/// Facts about an executed shuffle that every PE agrees on.
struct StepHistory {
  StepId step;
  bool recovery_point = false;
  bool backed_up = false;
  PartitionMap partition;
  std::map<PeId, std::vector<PeId>> backup_targets;
  Aggregates map_aggregates;
};

class Cluster;

/// Hooks for test instruments (delivery ledger, shadow comparisons).
class EngineObserver {
 public:
  virtual ~EngineObserver() = default;
  virtual void on_delivery(StepId, PeId /*dst*/, const Record&, Generation) {}
  /// After a shuffle completed, before failures at this barrier are handled.
  virtual void on_barrier(StepId, const Cluster&) {}
  virtual void on_failure(StepId /*event_step*/, std::span<const PeId> /*failed*/,
                          StepId /*recovery_point*/) {}
  virtual void on_reconstructed_inbox(StepId /*recovery_point*/, std::span<const PeId> /*failed*/,
                                      const std::vector<Record>&) {}
};

/// State of all virtual PEs plus the replicated job bookkeeping.
class Cluster {
 public:
  explicit Cluster(EngineConfig cfg);

  const EngineConfig& config() const { return cfg_; }
  const GroupMap& groups() const { return groups_; }
  const PartitionMap& partition() const { return pm_; }
  void set_partition(PartitionMap pm) { pm_ = std::move(pm); }

  std::vector<PeState>& pes() { return pes_; }
  const std::vector<PeState>& pes() const { return pes_; }
  PeState& pe(PeId id) { return pes_.at(id.value); }
  const PeState& pe(PeId id) const { return pes_.at(id.value); }
  std::vector<PeId> live() const;

  std::map<StepId, StepHistory>& history() { return history_; }
  const std::map<StepId, StepHistory>& history() const { return history_; }

  Metrics& metrics() { return metrics_; }
  const Metrics& metrics() const { return metrics_; }
  void warn(const std::string& msg);

  EngineObserver* observer() const { return observer_; }
  void set_observer(EngineObserver* obs) { observer_ = obs; }

  std::uint64_t log_bytes() const;

 private:
  EngineConfig cfg_;
  GroupMap groups_;
  PartitionMap pm_;
  std::vector<PeState> pes_;
  std::map<StepId, StepHistory> history_;
  Metrics metrics_;
  EngineObserver* observer_ = nullptr;
};

/// Fail-stop event fired at the shuffle barrier of `step`.
struct FailureEvent {
  StepId step;
  std::vector<PeId> failed;
};

void ingest(Cluster& c, const InputSource& source);
void map_phase(Cluster& c, StepId t, const MapFn& fn);
void shuffle(Cluster& c, StepId t);
/// Returns the global reduce aggregates.
Aggregates reduce_phase(Cluster& c, StepId t, const ReduceFn& fn);
void gc_logs(Cluster& c, StepId completed);

// Building blocks shared with recovery.
std::vector<Record> map_records(const std::vector<Record>& in, const MapFn& fn, StepId t,
                                PeId pe, Aggregates& aggregates, std::uint64_t* calls = nullptr);
std::vector<Record> reduce_entries(std::vector<InboxEntry> entries, const ReduceFn& fn, StepId t,
                                   PeId pe, const Aggregates& map_aggregates,
                                   Aggregates& aggregates, std::uint64_t* calls = nullptr);

struct JobResult {
  std::vector<std::vector<Record>> outputs;  // indexed by PeId; failed PEs empty
  Metrics metrics;
  std::uint32_t steps = 0;
  PartitionMap partition;
};

/// Ingests, runs every step the driver supplies, and recovers from the
/// planned failures. Events must be strictly ordered by step.
JobResult run_job(Cluster& c, JobDriver& driver, const InputSource& source,
                  std::span<const FailureEvent> failures = {});

}  // namespace ftmr
