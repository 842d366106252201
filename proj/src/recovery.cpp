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

#include "ftmr/recovery.hpp"

#include <algorithm>
#include <string>

namespace ftmr {

namespace {

std::string pe_list(std::span<const PeId> pes) {
  std::string s;
  for (PeId pe : pes) {
    if (!s.empty()) s += ',';
    s += std::to_string(pe.value);
  }
  return "{" + s + "}";
}

bool contains(std::span<const PeId> set, PeId pe) {
  return std::find(set.begin(), set.end(), pe) != set.end();
}

class Recovery {
 public:
  Recovery(Cluster& c, const FailureEvent& ev, JobDriver& driver, const InputSource& source)
      : c_(c), driver_(driver), source_(source), k_(ev.step), failed_(ev.failed) {
    std::sort(failed_.begin(), failed_.end());
    failed_.erase(std::unique(failed_.begin(), failed_.end()), failed_.end());
    r_ = last_recovery_point(c_.config(), k_);
  }

  void run() {
    check_preconditions();
    for (PeId pe : c_.live())
      if (!contains(failed_, pe)) survivors_.push_back(pe);

    for (PeId g : failed_) {
      PeState& pe = c_.pe(g);
      pe.alive = false;
      pe.died_at = k_;
      pe.current.clear();
      pe.inbox.clear();
      pe.sent_log.clear();
      pe.backup_store.clear();
    }
    if (auto* obs = c_.observer()) obs->on_failure(k_, failed_, r_);

    const PartitionMap& old_pm = c_.partition();
    if (c_.config().single_recoverer) {
      const PeId recoverer =
          backup_targets(failed_.front(), survivors_, BackupMode::single, c_.config().pes)[0];
      c_.set_partition(shrink_partition_to(old_pm, failed_, recoverer));
    } else {
      c_.set_partition(shrink_partition(old_pm, failed_));
    }

    metrics_.step = k_;
    metrics_.failed = failed_;
    metrics_.recovery_point = r_;

    StepId t;
    if (r_.value == 0) {
      pending_ = regenerate_input();
      t = StepId(1);
    } else {
      route_reconstructed_inbox();
      if (r_ == k_) {
        inject();
        finish();
        return;
      }
      reduce_recovered(r_);
      t = r_.next();
    }
    for (;; t = t.next()) {
      map_pending(t);
      route_replay(t);
      metrics_.replayed.push_back(t);
      if (t == k_) break;
      reduce_recovered(t);
    }
    inject();
    finish();
  }

 private:
  void check_preconditions() {
    const auto& cfg = c_.config();
    if (failed_.empty()) return;
    for (PeId g : failed_) {
      if (g.value >= c_.pes().size() || !c_.pe(g).alive)
        throw ConfigError("failure targets PE " + std::to_string(g.value) + " which is not alive");
    }
    if (cfg.backup == BackupMode::off)
      throw UnrecoverableFailure("failure of " + pe_list(failed_) + " at step " +
                                 std::to_string(k_.value) +
                                 ": fault tolerance is disabled, no messages were logged");
    std::size_t live = c_.live().size();
    if (failed_.size() >= live)
      throw UnrecoverableFailure("all PEs failed at step " + std::to_string(k_.value));

    // A PE that died at or after r sent messages at r..its death that nobody
    // else holds.
    for (const auto& pe : c_.pes()) {
      if (pe.alive || contains(failed_, pe.id)) continue;
      if (pe.died_at >= r_)
        throw UnrecoverableFailure(
            "failure of " + pe_list(failed_) + " at step " + std::to_string(k_.value) +
            ": recovery needs messages of step " + std::to_string(r_.value) +
            " and later sent by PE " + std::to_string(pe.id.value) + ", which failed at step " +
            std::to_string(pe.died_at.value));
    }

    if (r_.value == 0) {
      if (!source_.replayable)
        throw UnrecoverableFailure("input source is not replayable; cannot regenerate input of " +
                                   pe_list(failed_));
      return;
    }

    if (failed_.size() > 1) {
      const auto& groups = c_.groups();
      const bool one_group = !groups.trivial() &&
                             std::all_of(failed_.begin(), failed_.end(), [&](PeId g) {
                               return groups.same_group(g, failed_.front());
                             });
      if (!one_group)
        throw UnrecoverableFailure("simultaneous failure of " + pe_list(failed_) +
                                   " which do not form one failure group: messages between "
                                   "them at step " +
                                   std::to_string(r_.value) + " are lost");
    }

    auto hist = c_.history().find(r_);
    if (hist == c_.history().end() || !hist->second.backed_up)
      throw UnrecoverableFailure("no self-message backup exists for step " +
                                 std::to_string(r_.value));
    for (PeId g : failed_) {
      auto tg = hist->second.backup_targets.find(g);
      if (tg == hist->second.backup_targets.end())
        throw UnrecoverableFailure("no backup shares of PE " + std::to_string(g.value) +
                                   " at step " + std::to_string(r_.value));
      for (PeId holder : tg->second) {
        if (contains(failed_, holder) || !c_.pe(holder).alive)
          throw UnrecoverableFailure("backup share of PE " + std::to_string(g.value) +
                                     " at step " + std::to_string(r_.value) +
                                     " was lost with PE " + std::to_string(holder.value));
      }
    }
  }

  bool in_failed_range(std::uint64_t h, StepId t) const {
    return contains(failed_, c_.history().at(t).partition.owner_of(h));
  }

  // Sends one record from `holder` to its owner under the shrunk partition
  // and re-logs it on the holder.
  void deliver(StepId t, PeId holder, Record rec) {
    const PeId dst = c_.partition().owner_of(hash_key(rec.key));
    ++metrics_.records_resent;
    if (dst != holder) metrics_.bytes_resent += record_size(rec);
    c_.pe(holder).sent_log[t][dst].push_back(rec);
    if (auto* obs = c_.observer()) obs->on_delivery(t, dst, rec, Generation::recovery);
    recovered_[dst].push_back(InboxEntry{holder, next_seq_++, std::move(rec)});
  }

  std::map<PeId, std::vector<Record>> regenerate_input() {
    std::map<PeId, std::vector<Record>> out;
    std::size_t n = 0;
    for (PeId g : failed_) {
      for (auto& rec : source_.generate(g)) {
        out[survivors_[n % survivors_.size()]].push_back(std::move(rec));
        ++n;
      }
    }
    return out;
  }

  void route_reconstructed_inbox() {
    std::vector<std::pair<PeId, Record>> pieces;
    for (PeId s : survivors_) {
      PeState& pe = c_.pe(s);
      auto log = pe.sent_log.find(r_);
      if (log != pe.sent_log.end()) {
        for (PeId g : failed_) {
          auto it = log->second.find(g);
          if (it == log->second.end()) continue;
          for (auto& rec : it->second) pieces.emplace_back(s, std::move(rec));
          log->second.erase(it);
        }
      }
      auto store = pe.backup_store.find(r_);
      if (store == pe.backup_store.end()) continue;
      for (const auto& [key, recs] : store->second) {
        if (!contains(failed_, key.first)) continue;
        for (const auto& rec : recs)
          if (in_failed_range(hash_key(rec.key), r_)) pieces.emplace_back(s, rec);
      }
    }
    if (auto* obs = c_.observer()) {
      std::vector<Record> inbox;
      inbox.reserve(pieces.size());
      for (const auto& [holder, rec] : pieces) inbox.push_back(rec);
      obs->on_reconstructed_inbox(r_, failed_, inbox);
    }
    for (auto& [holder, rec] : pieces) deliver(r_, holder, std::move(rec));
  }

  void reduce_recovered(StepId t) {
    auto fns = driver_.step(t);
    if (!fns) throw std::logic_error("driver has no functions for replayed step");
    const Aggregates& map_aggs = c_.history().at(t).map_aggregates;
    pending_.clear();
    for (auto& [pe, entries] : recovered_) {
      Aggregates discarded;
      auto out = reduce_entries(std::move(entries), fns->reduce, t, pe, map_aggs, discarded);
      metrics_.records_recomputed += out.size();
      pending_[pe] = std::move(out);
    }
    recovered_.clear();
  }

  void map_pending(StepId t) {
    auto fns = driver_.step(t);
    if (!fns) throw std::logic_error("driver has no functions for replayed step");
    for (auto& [pe, recs] : pending_) {
      Aggregates discarded;
      recs = map_records(recs, fns->map, t, pe, discarded);
      metrics_.records_recomputed += recs.size();
    }
  }

  void route_replay(StepId t) {
    for (PeId s : survivors_) {
      auto it = pending_.find(s);
      if (it != pending_.end()) {
        for (auto& rec : it->second) {
          if (in_failed_range(hash_key(rec.key), t))
            deliver(t, s, std::move(rec));
          else
            ++metrics_.records_discarded;
        }
      }
      PeState& pe = c_.pe(s);
      auto log = pe.sent_log.find(t);
      if (log == pe.sent_log.end()) continue;
      for (PeId g : failed_) {
        auto entry = log->second.find(g);
        if (entry == log->second.end()) continue;
        std::vector<Record> recs = std::move(entry->second);
        log->second.erase(entry);
        for (auto& rec : recs) deliver(t, s, std::move(rec));
      }
    }
    pending_.clear();
  }

  void inject() {
    for (auto& [pe, entries] : recovered_) {
      auto& inbox = c_.pe(pe).inbox;
      for (auto& e : entries) inbox.push_back(std::move(e));
    }
    recovered_.clear();
  }

  void finish() { c_.metrics().recoveries.push_back(std::move(metrics_)); }

  Cluster& c_;
  JobDriver& driver_;
  const InputSource& source_;
  StepId k_;
  StepId r_;
  std::vector<PeId> failed_;
  std::vector<PeId> survivors_;
  std::map<PeId, std::vector<Record>> pending_;
  std::map<PeId, std::vector<InboxEntry>> recovered_;
  std::uint64_t next_seq_ = std::uint64_t(1) << 40;
  RecoveryMetrics metrics_;
};

}  // namespace

void recover(Cluster& c, const FailureEvent& event, JobDriver& driver,
             const InputSource& source) {
  if (event.failed.empty()) return;
  Recovery(c, event, driver, source).run();
}

void recover_group(Cluster& c, const FailureEvent& event, JobDriver& driver,
                   const InputSource& source) {
  if (c.groups().trivial())
    throw UnrecoverableFailure("group failure of " + pe_list(event.failed) +
                               " but group-aware backup is not enabled");
  recover(c, event, driver, source);
}

void recover_from_input(Cluster& c, const FailureEvent& event, JobDriver& driver,
                        const InputSource& source) {
  if (c.config().recovery_interval != 0)
    throw ConfigError("recover_from_input requires input-only recovery points");
  recover(c, event, driver, source);
}

}  // namespace ftmr
