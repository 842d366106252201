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
#include <string>
#include <vector>

#include "ftmr/core.hpp"

namespace ftmr {

/// Communication counters of one shuffle. Byte counts use record_size().
struct StepMetrics {
  StepId step;
  bool recovery_point = false;
  std::uint64_t network_bytes = 0;  // cross-PE shuffle records
  std::uint64_t self_bytes = 0;     // records a logical PE sends to itself
  std::uint64_t backup_bytes = 0;   // self-message shares sent to peers
  std::uint64_t records = 0;        // records shuffled
  std::uint64_t map_calls = 0;
  std::uint64_t reduce_calls = 0;
  /// Backup bytes received per PE, indexed by initial PeId.
  std::vector<std::uint64_t> backup_received;
  /// Largest fraction of one origin's backup that landed on a single peer.
  double max_origin_concentration = 0.0;
  /// sent_log + backup_store bytes retained across all PEs after this step's GC.
  std::uint64_t log_bytes = 0;
};

/// One recovery, as emitted into the metrics stream.
struct RecoveryMetrics {
  StepId step;
  std::vector<PeId> failed;
  StepId recovery_point;
  std::vector<StepId> replayed;
  std::uint64_t bytes_resent = 0;  // cross-PE bytes moved by recovery
  std::uint64_t records_resent = 0;
  std::uint64_t records_recomputed = 0;
  std::uint64_t records_discarded = 0;  // recomputed outside the failed range
};

struct Metrics {
  std::vector<StepMetrics> steps;
  std::vector<RecoveryMetrics> recoveries;
  std::uint64_t max_record_size = 0;  // m-hat
  std::vector<std::string> warnings;

  std::uint64_t network_total() const;
  std::uint64_t self_total() const;
  std::uint64_t backup_total() const;
  std::uint64_t records_total() const;
  std::uint64_t map_calls_total() const;
  std::uint64_t reduce_calls_total() const;
  /// m: total bytes shuffled (network + self).
  std::uint64_t volume_total() const { return network_total() + self_total(); }
  /// backup / network; 0 when nothing crossed the network.
  double overhead_ratio() const;

  /// Largest per-PE backup receipt divided by the mean over receiving PEs,
  /// maximised over recovery-point steps.
  double backup_imbalance() const;
};

/// `step,phase,network_bytes,self_bytes,backup_bytes,records` with one
/// `shuffle` row per step followed by one `recovery` row per recovery event
/// fired at that step.
std::string metrics_csv(const Metrics& m);

inline constexpr const char* kMetricsCsvHeader =
    "step,phase,network_bytes,self_bytes,backup_bytes,records";

}  // namespace ftmr
