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

#include "ftmr/engine.hpp"

namespace ftmr {

// Recovery from fail-stop failures detected at a shuffle barrier.
//
// The failed PEs' state at the last recovery point r is rebuilt from what the
// survivors still hold: the messages they sent there (their sent_log) and the
// backup shares of the failed PEs' self-messages. The failed hash range is
// split over the survivors, which re-run Reduce/Map for every step after r.
// Records recomputed during that replay which fall outside the failed range
// were delivered before the failure and are dropped instead of re-sent.
// With r = 0 the failed PEs' input is regenerated from the source.
//
// Every record moved by recovery is appended to the moving PE's sent_log
// under its step id.

/// Dispatches to the variants below depending on the event and the
/// recovery-point policy. An empty failed set is a no-op.
void recover(Cluster& c, const FailureEvent& event, JobDriver& driver,
             const InputSource& source);

/// Failure of a whole predefined group (or a subset of one), which is
/// recovered as if it were a single PE.
void recover_group(Cluster& c, const FailureEvent& event, JobDriver& driver,
                   const InputSource& source);

/// Recovery without self-message backups: replay from regenerated input.
/// Requires recovery_interval == 0.
void recover_from_input(Cluster& c, const FailureEvent& event, JobDriver& driver,
                        const InputSource& source);

}  // namespace ftmr
