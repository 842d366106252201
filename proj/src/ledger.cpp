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

#include "ftmr/ledger.hpp"

#include <algorithm>

namespace ftmr {

std::uint64_t record_fingerprint(StepId step, const Record& r) {
  std::string bytes = u64_bytes(step.value);
  encode_record(r, bytes);
  return hash_key(bytes);
}

void DeliveryLedger::on_delivery(StepId step, PeId dst, const Record& r, Generation g) {
  entries_.push_back(Entry{record_fingerprint(step, r), dst, step, g, false});
}

void DeliveryLedger::on_failure(StepId, std::span<const PeId> failed, StepId recovery_point) {
  for (auto& e : entries_) {
    if (e.voided || e.step < recovery_point) continue;
    if (std::find(failed.begin(), failed.end(), e.dst) != failed.end()) e.voided = true;
  }
}

std::vector<std::pair<StepId, std::uint64_t>> DeliveryLedger::effective() const {
  std::vector<std::pair<StepId, std::uint64_t>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_)
    if (!e.voided) out.emplace_back(e.step, e.fingerprint);
  std::sort(out.begin(), out.end());
  return out;
}

LedgerReport DeliveryLedger::compare(const DeliveryLedger& fault_free) const {
  LedgerReport rep;
  for (const auto& e : entries_) {
    if (e.voided) {
      ++rep.voided;
      continue;
    }
    ++rep.deliveries;
    if (e.generation == Generation::recovery) ++rep.recovery_deliveries;
  }
  const auto mine = effective();
  const auto oracle = fault_free.effective();
  std::size_t i = 0, j = 0;
  while (i < mine.size() || j < oracle.size()) {
    if (j == oracle.size() || (i < mine.size() && mine[i] < oracle[j])) {
      ++rep.duplicated;
      ++i;
    } else if (i == mine.size() || oracle[j] < mine[i]) {
      ++rep.missing;
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  rep.exactly_once = rep.duplicated == 0 && rep.missing == 0;
  if (!rep.exactly_once)
    rep.detail = std::to_string(rep.duplicated) + " duplicated, " + std::to_string(rep.missing) +
                 " missing deliveries";
  return rep;
}

}  // namespace ftmr
