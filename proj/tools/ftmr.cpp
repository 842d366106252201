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

// ftmr: run benchmarks, failure sweeps and overhead measurements on the
// simulated cluster.
//
// Exit codes: 0 success, 2 config error, 3 unrecoverable failure,
// 4 invariant or acceptance violation.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ftmr/config.hpp"
#include "ftmr/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnrecoverable = 3;
constexpr int kExitViolation = 4;

struct Options {
  std::string config_file;
  std::map<std::string, std::string> settings;  // config key -> value, from flags
  std::vector<std::string> fail;
  double tolerance = 1e-12;
  std::string seeds = "1,2,3,4,5";
};

void add_job_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_file, "key=value config file; flags override it");
  auto setting = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&o, key](const std::string& v) { o.settings[key] = v; }, help);
  };
  setting("--benchmark", "benchmark", "wordcount | rmat | cc | pagerank | uniform");
  setting("--pes", "pes", "number of virtual PEs");
  setting("--pes-per-node", "pes_per_node", "PEs failing together in generated plans");
  setting("--seed", "seed", "64-bit seed (default: $FTMR_SEED or 1)");
  setting("--backup-mode", "backup_mode", "split | single | off");
  setting("--recovery-point-interval", "recovery_point_interval", "N or input-only");
  setting("--groups", "groups", "failure-group size");
  cmd->add_option("--fail", o.fail, "step:pe[,pe...] (repeatable) or fraction=X");
  setting("--iterations", "iterations", "PageRank iterations");
  setting("--vertices-per-pe", "vertices_per_pe", "graph vertices per PE");
  setting("--avg-degree", "avg_degree", "average degree (graph benchmarks)");
  setting("--words-per-pe", "words_per_pe", "Word Count words per PE");
  setting("--dictionary-size", "dictionary_size", "Word Count dictionary size");
  setting("--records-per-pe", "records_per_pe", "uniform records per PE");
  cmd->add_flag_function(
      "--single-recoverer",
      [&o](std::int64_t n) { o.settings["single_recoverer"] = n > 0 ? "true" : "false"; },
      "recover through one survivor");
  setting("--metrics", "metrics", "metrics CSV path");
  setting("--dump-dir", "dump_dir", "write per-PE outputs here");
}

ftmr::JobConfig build_config(const Options& o, bool overhead) {
  ftmr::JobConfig cfg;
  if (overhead) {
    cfg.benchmark = ftmr::bench::Benchmark::uniform;
    cfg.pes = 16;
  }
  if (const char* env = std::getenv("FTMR_SEED"); env != nullptr && *env != '\0')
    cfg.set("seed", env);
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ftmr::ConfigError("cannot read config file " + o.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg.apply_text(ss.str());
  }
  for (const auto& [k, v] : o.settings) cfg.set(k, v);
  if (!o.fail.empty()) {
    std::string joined;
    for (const auto& f : o.fail) joined += (joined.empty() ? "" : ";") + f;
    cfg.set("fail", joined);
  }
  cfg.validate();
  return cfg;
}

void write_metrics(const ftmr::JobConfig& cfg, const ftmr::Metrics& m) {
  const std::string path = cfg.metrics_path.empty() ? "metrics.csv" : cfg.metrics_path;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ftmr::ConfigError("cannot write metrics to " + path);
  out << ftmr::metrics_csv(m);
}

int cmd_run(const ftmr::JobConfig& cfg) {
  const auto res = ftmr::run_simulation(cfg);
  write_metrics(cfg, res.job.metrics);
  if (!cfg.dump_dir.empty()) ftmr::dump_outputs(res.job.outputs, cfg.dump_dir);

  std::uint64_t out_records = 0;
  for (const auto& o : res.job.outputs) out_records += o.size();
  std::printf("benchmark=%s\n", ftmr::bench::to_string(cfg.benchmark).c_str());
  std::printf("pes=%u\nseed=%llu\nsteps=%u\noutput_records=%llu\n", cfg.pes,
              static_cast<unsigned long long>(cfg.seed), res.job.steps,
              static_cast<unsigned long long>(out_records));
  std::printf("network_bytes=%llu\nbackup_bytes=%llu\noverhead_ratio=%.6f\n",
              static_cast<unsigned long long>(res.job.metrics.network_total()),
              static_cast<unsigned long long>(res.job.metrics.backup_total()),
              res.job.metrics.overhead_ratio());
  for (const auto& ev : res.events)
    std::printf("failure=%s\n", ftmr::format_failure_event(ev).c_str());
  std::printf("recoveries=%zu\n", res.job.metrics.recoveries.size());
  for (const auto& w : res.job.metrics.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (res.ledger_checked) {
    std::printf("ledger=%s\n", res.ledger.exactly_once ? "exactly-once" : "violated");
    if (!res.ledger.exactly_once) {
      std::fprintf(stderr, "delivery ledger violated: %s\n", res.ledger.detail.c_str());
      return kExitViolation;
    }
  }
  return kExitOk;
}

int cmd_sweep(const ftmr::JobConfig& cfg, double tolerance) {
  const auto rep = ftmr::sweep_failures(cfg, tolerance);
  std::printf("%s\n", rep.summary().c_str());
  std::printf("steps=%u\nmax_deviation=%.3g\n", rep.steps, rep.max_deviation);
  for (const auto& c : rep.counterexamples) {
    std::string pes;
    for (auto pe : c.failed) pes += (pes.empty() ? "" : ",") + std::to_string(pe.value);
    std::printf("counterexample fail=%u:%s backup_mode=%s: %s\n", c.step.value, pes.c_str(),
                ftmr::to_string(c.mode).c_str(), c.detail.c_str());
  }
  if (!rep.counterexamples.empty()) {
    std::printf("config:\n%s", cfg.to_text().c_str());
    return kExitViolation;
  }
  return kExitOk;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ftmr::JobConfig tmp;
    tmp.set("seed", item);
    out.push_back(tmp.seed);
  }
  if (out.empty()) throw ftmr::ConfigError("no seeds given");
  return out;
}

int cmd_overhead(const ftmr::JobConfig& cfg, const std::string& seeds) {
  const auto s = parse_seeds(seeds);
  const auto st = ftmr::measure_overhead(cfg, s);
  std::printf("pes=%u\nruns=%zu\n", st.pes, st.runs);
  std::printf("ratio_mean=%.6f\nratio_min=%.6f\nratio_max=%.6f\n", st.mean_ratio, st.min_ratio,
              st.max_ratio);
  std::printf("reference=%.6f\n", st.reference);
  std::printf("backup_imbalance=%.4f\nmax_origin_concentration=%.4f\n", st.max_imbalance,
              st.max_concentration);
  if (cfg.backup_mode == ftmr::BackupMode::split &&
      (st.mean_ratio < 0.75 * st.reference || st.mean_ratio > 1.25 * st.reference)) {
    std::fprintf(stderr, "mean ratio outside [0.75, 1.25] x reference\n");
    return kExitViolation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant MapReduce simulator"};
  app.require_subcommand(1);
  Options run_opts, sweep_opts, overhead_opts;
  auto* run = app.add_subcommand("run", "run one job, optionally with failures");
  add_job_flags(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "fail every PE at every step and compare");
  add_job_flags(sweep, sweep_opts);
  sweep->add_option("--tolerance", sweep_opts.tolerance, "PageRank score tolerance");
  auto* overhead = app.add_subcommand("overhead", "measure backup / network volume");
  add_job_flags(overhead, overhead_opts);
  overhead->add_option("--seeds", overhead_opts.seeds, "comma-separated seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(build_config(run_opts, false));
    if (sweep->parsed()) return cmd_sweep(build_config(sweep_opts, false), sweep_opts.tolerance);
    return cmd_overhead(build_config(overhead_opts, true), overhead_opts.seeds);
  } catch (const ftmr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ftmr::UnrecoverableFailure& e) {
    std::fprintf(stderr, "unrecoverable failure: %s\n", e.what());
    return kExitUnrecoverable;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitViolation;
  }
}
