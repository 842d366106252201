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
#include <string>
#include <string_view>
#include <vector>

#include "ftmr/benchmarks.hpp"
#include "ftmr/engine.hpp"

namespace ftmr {

std::string to_string(BackupMode m);
BackupMode parse_backup_mode(std::string_view s);

/// `step:pe[,pe...]`
FailureEvent parse_failure_event(std::string_view s);
std::string format_failure_event(const FailureEvent& ev);

/// Everything needed to run one experiment. The textual form is one
/// `key=value` per line; parse(format(c)) == c.
struct JobConfig {
  bench::Benchmark benchmark = bench::Benchmark::wordcount;
  std::uint32_t pes = 4;
  std::uint32_t pes_per_node = 1;
  std::uint64_t seed = 1;
  BackupMode backup_mode = BackupMode::split;
  std::uint32_t recovery_point_interval = 1;  // 0 = input-only
  std::uint32_t groups = 0;                   // failure-group size, 0 = none
  std::vector<FailureEvent> failures;
  std::optional<double> fail_fraction;
  bool single_recoverer = false;

  std::uint32_t iterations = 100;
  std::uint64_t vertices_per_pe = 1024;
  double avg_degree = -1.0;  // negative: benchmark default
  std::uint64_t words_per_pe = 10000;
  std::uint64_t dictionary_size = 1000;
  std::uint64_t records_per_pe = 6250;

  std::string metrics_path;
  std::string dump_dir;

  /// Throws ConfigError on invalid values or combinations.
  void validate() const;

  std::string to_text() const;
  static JobConfig from_text(std::string_view text);
  /// Applies the settings of a textual config on top of this one.
  void apply_text(std::string_view text);
  /// Applies one `key=value` setting.
  void set(std::string_view key, std::string_view value);

  bench::BenchmarkParams benchmark_params() const;
  EngineConfig engine_config() const;

  bool operator==(const JobConfig& other) const;
};

/// Parses `input-only` or a positive integer.
std::uint32_t parse_recovery_interval(std::string_view s);
std::string format_recovery_interval(std::uint32_t interval);

}  // namespace ftmr
