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

#include <doctest.h>

#include "ftmr/config.hpp"

using namespace ftmr;

TEST_CASE("default config round-trips") {
  const JobConfig c;
  CHECK(JobConfig::from_text(c.to_text()) == c);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("non-default config round-trips") {
  JobConfig c;
  c.benchmark = bench::Benchmark::pagerank;
  c.pes = 8;
  c.pes_per_node = 2;
  c.seed = 18446744073709551615ULL;
  c.backup_mode = BackupMode::single;
  c.recovery_point_interval = 0;
  c.groups = 2;
  c.failures = {FailureEvent{StepId(2), {PeId(2), PeId(3)}}, FailureEvent{StepId(4), {PeId(6)}}};
  c.single_recoverer = true;
  c.iterations = 7;
  c.vertices_per_pe = 33;
  c.avg_degree = 0.1;
  c.words_per_pe = 5;
  c.dictionary_size = 6;
  c.records_per_pe = 9;
  c.metrics_path = "out/m.csv";
  c.dump_dir = "dumps";
  const auto text = c.to_text();
  const auto back = JobConfig::from_text(text);
  CHECK(back == c);
  CHECK(back.avg_degree == 0.1);
  CHECK(back.failures.size() == 2);
  CHECK(back.failures[0].failed == std::vector<PeId>{PeId(2), PeId(3)});
  CHECK(text.find("recovery_point_interval=input-only") != std::string::npos);
  CHECK(text.find("fail=2:2,3;4:6") != std::string::npos);
  CHECK_NOTHROW(back.validate());

  JobConfig f;
  f.fail_fraction = 0.1;
  CHECK(JobConfig::from_text(f.to_text()).fail_fraction == 0.1);
}

TEST_CASE("text form tolerates comments and blank lines") {
  const auto c = JobConfig::from_text("# experiment\n\n pes = 6 \nbenchmark=cc\r\n");
  CHECK(c.pes == 6);
  CHECK(c.benchmark == bench::Benchmark::cc);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(JobConfig::from_text("pes"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("colour=blue"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("pes=four"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("pes=-1"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("backup_mode=double"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("recovery_point_interval=0"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("fail=3"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("fail=x:1"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("avg_degree=1.5x"), ConfigError);
  CHECK_THROWS_AS(JobConfig::from_text("single_recoverer=maybe"), ConfigError);
}

TEST_CASE("failure events") {
  const auto ev = parse_failure_event("5:1,3");
  CHECK(ev.step == StepId(5));
  CHECK(ev.failed == std::vector<PeId>{PeId(1), PeId(3)});
  CHECK(format_failure_event(ev) == "5:1,3");
  CHECK(parse_recovery_interval("input-only") == 0);
  CHECK(parse_recovery_interval("3") == 3);
  CHECK(format_recovery_interval(0) == "input-only");
}

TEST_CASE("validation rejects bad combinations") {
  auto bad = [](const char* text) { return JobConfig::from_text(text); };
  CHECK_THROWS_AS(bad("pes=0").validate(), ConfigError);
  CHECK_THROWS_AS(bad("pes=6\npes_per_node=4").validate(), ConfigError);
  CHECK_THROWS_AS(bad("pes=6\ngroups=4").validate(), ConfigError);
  CHECK_THROWS_AS(bad("pes=4\ngroups=4").validate(), ConfigError);
  CHECK_NOTHROW(bad("pes=4\ngroups=4\nrecovery_point_interval=input-only").validate());
  CHECK_THROWS_AS(bad("fail=0:1").validate(), ConfigError);
  CHECK_THROWS_AS(bad("fail=1:9").validate(), ConfigError);
  CHECK_THROWS_AS(bad("fail=2:1;1:2").validate(), ConfigError);
  CHECK_THROWS_AS(bad("fail=1:1;2:1").validate(), ConfigError);
  CHECK_THROWS_AS(bad("fail=1:0,1,2,3").validate(), ConfigError);
  CHECK_THROWS_AS(bad("pes=8\ngroups=2\nfail=1:1,2").validate(), ConfigError);
  CHECK_NOTHROW(bad("pes=8\ngroups=2\nfail=1:2,3").validate());
  CHECK_THROWS_AS(bad("fail=fraction=0").validate(), ConfigError);
  CHECK_THROWS_AS(bad("fail=fraction=1.5").validate(), ConfigError);
  CHECK_THROWS_AS(bad("pes=8\npes_per_node=2\nfail=fraction=0.25").validate(), ConfigError);
  CHECK_NOTHROW(bad("pes=8\npes_per_node=2\ngroups=2\nfail=fraction=0.25").validate());
  CHECK_THROWS_AS(bad("benchmark=pagerank\niterations=0").validate(), ConfigError);
}

TEST_CASE("engine and benchmark views") {
  const auto c = JobConfig::from_text("pes=6\ngroups=3\nbackup_mode=single\nrecovery_point_interval=2\n"
                                      "benchmark=cc\nvertices_per_pe=10\nseed=4");
  const auto e = c.engine_config();
  CHECK(e.pes == 6);
  CHECK(e.group_size == 3);
  CHECK(e.backup == BackupMode::single);
  CHECK(e.recovery_interval == 2);
  const auto b = c.benchmark_params();
  CHECK(b.vertices() == 60);
  CHECK(b.seed == 4);
  CHECK(JobConfig{}.engine_config().group_size == 1);
}
