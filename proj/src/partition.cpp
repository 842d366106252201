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

#include "ftmr/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ftmr {

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_key(std::string_view key) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return splitmix64_mix(h);
}

PartitionMap::PartitionMap(std::vector<HashRange> ranges) : ranges_(std::move(ranges)) {
  std::sort(ranges_.begin(), ranges_.end(),
            [](const HashRange& a, const HashRange& b) { return a.lo < b.lo; });
}

PeId PartitionMap::owner_of(std::uint64_t h) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), HashBound(h),
                             [](HashBound v, const HashRange& r) { return v < r.lo; });
  if (it == ranges_.begin()) throw std::logic_error("hash below first range");
  return std::prev(it)->owner;
}

std::vector<HashRange> PartitionMap::ranges_of(PeId pe) const {
  std::vector<HashRange> out;
  for (const auto& r : ranges_)
    if (r.owner == pe) out.push_back(r);
  return out;
}

std::vector<PeId> PartitionMap::owners() const {
  std::vector<PeId> out;
  for (const auto& r : ranges_) out.push_back(r.owner);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void PartitionMap::validate() const {
  HashBound expect = 0;
  for (const auto& r : ranges_) {
    if (r.lo != expect) throw std::logic_error("partition has a gap or overlap");
    if (r.hi <= r.lo) throw std::logic_error("partition has an empty range");
    expect = r.hi;
  }
  if (expect != kHashSpaceEnd) throw std::logic_error("partition does not reach 2^64");
}

PartitionMap initial_partition(std::uint32_t p) {
  if (p == 0) throw ConfigError("initial_partition: p must be positive");
  std::vector<HashRange> ranges;
  ranges.reserve(p);
  for (std::uint32_t i = 0; i < p; ++i) {
    HashRange r;
    r.owner = PeId(i);
    r.lo = (kHashSpaceEnd * i) / p;
    r.hi = (kHashSpaceEnd * (i + 1)) / p;
    ranges.push_back(r);
  }
  return PartitionMap(std::move(ranges));
}

namespace {

bool contains_pe(std::span<const PeId> set, PeId pe) {
  return std::find(set.begin(), set.end(), pe) != set.end();
}

std::vector<PeId> survivors_of(const PartitionMap& pm, std::span<const PeId> failed) {
  std::vector<PeId> survivors;
  for (PeId pe : pm.owners())
    if (!contains_pe(failed, pe)) survivors.push_back(pe);
  if (survivors.empty()) throw UnrecoverableFailure("all PEs failed");
  return survivors;
}

}  // namespace

PartitionMap shrink_partition(const PartitionMap& pm, std::span<const PeId> failed) {
  if (failed.empty()) return pm;
  const auto survivors = survivors_of(pm, failed);
  const HashBound s = survivors.size();
  std::vector<HashRange> out;
  for (const auto& r : pm.ranges()) {
    if (!contains_pe(failed, r.owner)) {
      out.push_back(r);
      continue;
    }
    for (std::size_t k = 0; k < survivors.size(); ++k) {
      HashRange piece;
      piece.owner = survivors[k];
      piece.lo = r.lo + (r.width() * k) / s;
      piece.hi = r.lo + (r.width() * (k + 1)) / s;
      if (piece.hi > piece.lo) out.push_back(piece);
    }
  }
  return PartitionMap(std::move(out));
}

PartitionMap shrink_partition_to(const PartitionMap& pm, std::span<const PeId> failed,
                                 PeId recoverer) {
  if (failed.empty()) return pm;
  const auto survivors = survivors_of(pm, failed);
  if (!contains_pe(survivors, recoverer))
    throw std::logic_error("recoverer is not a survivor");
  std::vector<HashRange> out = pm.ranges();
  for (auto& r : out)
    if (contains_pe(failed, r.owner)) r.owner = recoverer;
  return PartitionMap(std::move(out));
}

GroupMap GroupMap::blocks(std::uint32_t p, std::uint32_t group_size) {
  if (group_size == 0) throw ConfigError("group size must be positive");
  GroupMap g;
  g.group_of_.resize(p);
  for (std::uint32_t i = 0; i < p; ++i) g.group_of_[i] = i / group_size;
  g.groups_ = (p + group_size - 1) / group_size;
  return g;
}

std::uint32_t GroupMap::group_of(PeId pe) const {
  if (pe.value >= group_of_.size()) return pe.value;
  return group_of_[pe.value];
}

bool GroupMap::trivial() const { return groups_ == group_of_.size(); }

std::vector<PeId> GroupMap::members(std::uint32_t group) const {
  std::vector<PeId> out;
  for (std::uint32_t i = 0; i < group_of_.size(); ++i)
    if (group_of_[i] == group) out.push_back(PeId(i));
  return out;
}

std::vector<PeId> backup_targets(PeId i, std::span<const PeId> live, BackupMode mode,
                                 std::uint32_t p_initial, const GroupMap* groups) {
  auto excluded = [&](PeId pe) {
    return pe == i || (groups != nullptr && groups->same_group(pe, i));
  };
  std::vector<PeId> out;
  if (mode == BackupMode::off) return out;
  if (mode == BackupMode::split) {
    std::vector<PeId> sorted(live.begin(), live.end());
    std::sort(sorted.begin(), sorted.end());
    for (PeId pe : sorted)
      if (!excluded(pe)) out.push_back(pe);
  } else if (mode == BackupMode::single) {
    for (std::uint32_t step = 1; step < p_initial; ++step) {
      PeId cand((i.value + step) % p_initial);
      if (!excluded(cand) && contains_pe(live, cand)) {
        out.push_back(cand);
        break;
      }
    }
  }
  if (out.empty())
    throw ConfigError("no backup target available for PE " + std::to_string(i.value));
  return out;
}

std::vector<std::pair<PeId, std::vector<Record>>> split_self_message(
    std::span<const Record> records, std::span<const PeId> targets) {
  std::vector<std::pair<PeId, std::vector<Record>>> shares;
  shares.reserve(targets.size());
  for (PeId t : targets) shares.emplace_back(t, std::vector<Record>{});
  if (targets.empty()) return shares;
  for (std::size_t j = 0; j < records.size(); ++j)
    shares[j % targets.size()].second.push_back(records[j]);
  return shares;
}

}  // namespace ftmr
