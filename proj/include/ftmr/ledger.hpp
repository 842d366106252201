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

#include "ftmr/engine.hpp"

namespace ftmr {

/// 64-bit fingerprint of a delivered record: hash of the step id and the
/// record's wire encoding.
std::uint64_t record_fingerprint(StepId step, const Record& r);

struct LedgerReport {
  bool exactly_once = true;
  std::uint64_t deliveries = 0;           // effective deliveries
  std::uint64_t recovery_deliveries = 0;  // effective deliveries made by recovery
  std::uint64_t voided = 0;               // deliveries lost with a failed PE
  std::uint64_t duplicated = 0;           // effective deliveries the oracle does not have
  std::uint64_t missing = 0;              // oracle deliveries with no effective counterpart
  std::string detail;
};

/// Test instrument recording every record delivery. Deliveries into a PE
/// that later fails are voided from the recovery point on; the remaining
/// (effective) deliveries of a faulty run must match those of a fault-free
/// run exactly, per step and with multiplicity.
class DeliveryLedger : public EngineObserver {
 public:
  struct Entry {
    std::uint64_t fingerprint = 0;
    PeId dst;
    StepId step;
    Generation generation = Generation::original;
    bool voided = false;
  };

  void on_delivery(StepId step, PeId dst, const Record& r, Generation g) override;
  void on_failure(StepId event_step, std::span<const PeId> failed, StepId recovery_point) override;

  const std::vector<Entry>& entries() const { return entries_; }

  /// Effective deliveries as sorted (step, fingerprint) pairs, with repeats.
  std::vector<std::pair<StepId, std::uint64_t>> effective() const;

  /// Compares against the ledger of a fault-free run of the same job.
  LedgerReport compare(const DeliveryLedger& fault_free) const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace ftmr
