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

#include "ftmr/config.hpp"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace ftmr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_uint(std::string_view s, std::string_view what) {
  s = trim(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size())
    throw ConfigError("invalid " + std::string(what) + ": '" + copy + "'");
  return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string to_string(BackupMode m) {
  switch (m) {
    case BackupMode::split: return "split";
    case BackupMode::single: return "single";
    case BackupMode::off: return "off";
  }
  return "?";
}

BackupMode parse_backup_mode(std::string_view s) {
  s = trim(s);
  if (s == "split") return BackupMode::split;
  if (s == "single") return BackupMode::single;
  if (s == "off") return BackupMode::off;
  throw ConfigError("unknown backup mode '" + std::string(s) + "'");
}

FailureEvent parse_failure_event(std::string_view s) {
  s = trim(s);
  const auto colon = s.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("failure event must look like step:pe[,pe...], got '" + std::string(s) + "'");
  FailureEvent ev;
  ev.step = StepId(parse_uint<std::uint32_t>(s.substr(0, colon), "failure step"));
  for (auto pe : split(s.substr(colon + 1), ','))
    ev.failed.push_back(PeId(parse_uint<std::uint32_t>(pe, "failure PE")));
  return ev;
}

std::string format_failure_event(const FailureEvent& ev) {
  std::string s = std::to_string(ev.step.value) + ":";
  for (std::size_t i = 0; i < ev.failed.size(); ++i) {
    if (i != 0) s += ',';
    s += std::to_string(ev.failed[i].value);
  }
  return s;
}

std::uint32_t parse_recovery_interval(std::string_view s) {
  s = trim(s);
  if (s == "input-only") return 0;
  const auto v = parse_uint<std::uint32_t>(s, "recovery point interval");
  if (v == 0) throw ConfigError("recovery point interval must be positive or input-only");
  return v;
}

std::string format_recovery_interval(std::uint32_t interval) {
  return interval == 0 ? "input-only" : std::to_string(interval);
}

void JobConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "benchmark") {
    benchmark = bench::parse_benchmark(value);
  } else if (key == "pes") {
    pes = parse_uint<std::uint32_t>(value, "pes");
  } else if (key == "pes_per_node") {
    pes_per_node = parse_uint<std::uint32_t>(value, "pes_per_node");
  } else if (key == "seed") {
    seed = parse_uint<std::uint64_t>(value, "seed");
  } else if (key == "backup_mode") {
    backup_mode = parse_backup_mode(value);
  } else if (key == "recovery_point_interval") {
    recovery_point_interval = parse_recovery_interval(value);
  } else if (key == "groups") {
    groups = parse_uint<std::uint32_t>(value, "groups");
  } else if (key == "fail") {
    failures.clear();
    fail_fraction.reset();
    if (value.empty()) return;
    if (value.starts_with("fraction=")) {
      fail_fraction = parse_double(value.substr(9), "failure fraction");
      return;
    }
    for (auto ev : split(value, ';'))
      if (!trim(ev).empty()) failures.push_back(parse_failure_event(ev));
  } else if (key == "single_recoverer") {
    single_recoverer = parse_bool(value, "single_recoverer");
  } else if (key == "iterations") {
    iterations = parse_uint<std::uint32_t>(value, "iterations");
  } else if (key == "vertices_per_pe") {
    vertices_per_pe = parse_uint<std::uint64_t>(value, "vertices_per_pe");
  } else if (key == "avg_degree") {
    avg_degree = parse_double(value, "avg_degree");
  } else if (key == "words_per_pe") {
    words_per_pe = parse_uint<std::uint64_t>(value, "words_per_pe");
  } else if (key == "dictionary_size") {
    dictionary_size = parse_uint<std::uint64_t>(value, "dictionary_size");
  } else if (key == "records_per_pe") {
    records_per_pe = parse_uint<std::uint64_t>(value, "records_per_pe");
  } else if (key == "metrics") {
    metrics_path = std::string(value);
  } else if (key == "dump_dir") {
    dump_dir = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

JobConfig JobConfig::from_text(std::string_view text) {
  JobConfig c;
  c.apply_text(text);
  return c;
}

void JobConfig::apply_text(std::string_view text) {
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

std::string JobConfig::to_text() const {
  std::ostringstream out;
  out << "benchmark=" << bench::to_string(benchmark) << '\n'
      << "pes=" << pes << '\n'
      << "pes_per_node=" << pes_per_node << '\n'
      << "seed=" << seed << '\n'
      << "backup_mode=" << to_string(backup_mode) << '\n'
      << "recovery_point_interval=" << format_recovery_interval(recovery_point_interval) << '\n'
      << "groups=" << groups << '\n';
  out << "fail=";
  if (fail_fraction) {
    out << "fraction=" << format_double(*fail_fraction);
  } else {
    for (std::size_t i = 0; i < failures.size(); ++i)
      out << (i ? ";" : "") << format_failure_event(failures[i]);
  }
  out << '\n'
      << "single_recoverer=" << (single_recoverer ? "true" : "false") << '\n'
      << "iterations=" << iterations << '\n'
      << "vertices_per_pe=" << vertices_per_pe << '\n'
      << "avg_degree=" << format_double(avg_degree) << '\n'
      << "words_per_pe=" << words_per_pe << '\n'
      << "dictionary_size=" << dictionary_size << '\n'
      << "records_per_pe=" << records_per_pe << '\n'
      << "metrics=" << metrics_path << '\n'
      << "dump_dir=" << dump_dir << '\n';
  return out.str();
}

void JobConfig::validate() const {
  if (pes == 0) throw ConfigError("pes must be positive");
  if (pes_per_node == 0 || pes % pes_per_node != 0)
    throw ConfigError("pes_per_node must be positive and divide pes");
  if (groups != 0) {
    if (pes % groups != 0) throw ConfigError("group size must divide pes");
    if (groups == pes && groups > 1 && backup_mode != BackupMode::off &&
        recovery_point_interval != 0)
      throw ConfigError("a single failure group spanning all PEs leaves no backup target");
  }
  if (benchmark == bench::Benchmark::pagerank && iterations == 0)
    throw ConfigError("pagerank needs at least one iteration");
  if (fail_fraction) {
    if (!(*fail_fraction > 0.0 && *fail_fraction <= 1.0))
      throw ConfigError("failure fraction must be in (0, 1]");
    if (pes_per_node > 1 && groups != pes_per_node && recovery_point_interval != 0)
      throw ConfigError("failing whole nodes needs groups equal to pes_per_node");
  }
  const std::uint32_t group = groups == 0 ? 1 : groups;
  std::set<std::uint32_t> dead;
  std::uint32_t prev = 0;
  for (const auto& ev : failures) {
    if (ev.step.value == 0) throw ConfigError("failure steps start at 1");
    if (ev.step.value <= prev) throw ConfigError("failure events must have increasing steps");
    prev = ev.step.value;
    if (ev.failed.empty()) throw ConfigError("failure event without PEs");
    for (PeId pe : ev.failed) {
      if (pe.value >= pes) throw ConfigError("failure targets PE " + std::to_string(pe.value) +
                                             " but there are only " + std::to_string(pes));
      if (!dead.insert(pe.value).second)
        throw ConfigError("PE " + std::to_string(pe.value) + " fails twice");
      if (ev.failed.size() > 1 && group > 1 && recovery_point_interval != 0 &&
          pe.value / group != ev.failed.front().value / group)
        throw ConfigError("multi-PE failure event crosses failure-group boundaries");
    }
  }
  if (dead.size() >= pes && !failures.empty()) throw ConfigError("failure plan kills every PE");
  (void)benchmark_params();
}

bench::BenchmarkParams JobConfig::benchmark_params() const {
  bench::BenchmarkParams p;
  p.benchmark = benchmark;
  p.pes = pes;
  p.seed = seed;
  p.words_per_pe = words_per_pe;
  p.dictionary_size = dictionary_size;
  p.vertices_per_pe = vertices_per_pe;
  p.avg_degree = avg_degree;
  p.iterations = iterations;
  p.records_per_pe = records_per_pe;
  return p;
}

EngineConfig JobConfig::engine_config() const {
  EngineConfig e;
  e.pes = pes;
  e.backup = backup_mode;
  e.recovery_interval = recovery_point_interval;
  e.group_size = groups == 0 ? 1 : groups;
  e.single_recoverer = single_recoverer;
  return e;
}

bool JobConfig::operator==(const JobConfig& o) const { return to_text() == o.to_text(); }

}  // namespace ftmr
