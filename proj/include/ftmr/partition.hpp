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
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ftmr/core.hpp"

namespace ftmr {

/// FNV-1a over the key bytes followed by the splitmix64 mixing function.
/// The value is part of the data layout: every PE must agree on it forever.
std::uint64_t hash_key(std::string_view key);

/// splitmix64 output mixing function (no state increment).
std::uint64_t splitmix64_mix(std::uint64_t z);

using HashBound = unsigned __int128;
inline constexpr HashBound kHashSpaceEnd = HashBound(1) << 64;

/// Half-open interval [lo, hi) of the 64-bit hash domain owned by one PE.
struct HashRange {
  PeId owner;
  HashBound lo = 0;
  HashBound hi = 0;

  HashBound width() const { return hi - lo; }
  bool contains(std::uint64_t h) const { return h >= lo && HashBound(h) < hi; }
  bool operator==(const HashRange&) const = default;
};

/// Assignment of the hash domain to live PEs. Ranges are kept sorted by lower
/// bound; they are disjoint and cover [0, 2^64).
class PartitionMap {
 public:
  PartitionMap() = default;
  explicit PartitionMap(std::vector<HashRange> ranges);

  const std::vector<HashRange>& ranges() const { return ranges_; }
  PeId owner_of(std::uint64_t h) const;

  /// Ranges owned by `pe`, in ascending order of lower bound.
  std::vector<HashRange> ranges_of(PeId pe) const;

  /// Live PEs, i.e. the owners of at least one range, ascending.
  std::vector<PeId> owners() const;

  /// Checks disjointness and coverage. Throws std::logic_error on violation.
  void validate() const;

  bool operator==(const PartitionMap&) const = default;

 private:
  std::vector<HashRange> ranges_;
};

PartitionMap initial_partition(std::uint32_t p);

inline PeId owner_of(std::uint64_t h, const PartitionMap& pm) { return pm.owner_of(h); }

/// Splits every range of every failed PE into |survivors| floor-equal pieces
/// handed out to survivors in ascending id order. Survivors keep their own
/// ranges untouched.
PartitionMap shrink_partition(const PartitionMap& pm, std::span<const PeId> failed);

/// Variant that hands all ranges of the failed PEs to a single survivor.
PartitionMap shrink_partition_to(const PartitionMap& pm, std::span<const PeId> failed,
                                 PeId recoverer);

enum class BackupMode { split, single, off };

/// Static partition of the initial PEs into failure groups. Without explicit
/// groups every PE is its own group.
class GroupMap {
 public:
  GroupMap() = default;
  /// Consecutive groups of `group_size` PEs; the last group may be smaller.
  static GroupMap blocks(std::uint32_t p, std::uint32_t group_size);
  static GroupMap singletons(std::uint32_t p) { return blocks(p, 1); }

  std::uint32_t group_of(PeId pe) const;
  std::uint32_t group_count() const { return groups_; }
  bool trivial() const;
  std::vector<PeId> members(std::uint32_t group) const;
  bool same_group(PeId a, PeId b) const { return group_of(a) == group_of(b); }

 private:
  std::vector<std::uint32_t> group_of_;
  std::uint32_t groups_ = 0;
};

/// Peers that receive PE i's self-message shares.
///  - split: every live PE outside i's group, ascending;
///  - single: the next live PE after i (mod p_initial) outside i's group.
/// Throws ConfigError when no peer qualifies.
std::vector<PeId> backup_targets(PeId i, std::span<const PeId> live, BackupMode mode,
                                 std::uint32_t p_initial, const GroupMap* groups = nullptr);

/// Round-robin by arrival index: record j goes to share j mod |targets|.
std::vector<std::pair<PeId, std::vector<Record>>> split_self_message(
    std::span<const Record> records, std::span<const PeId> targets);

}  // namespace ftmr
