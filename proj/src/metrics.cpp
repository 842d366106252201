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

#include "ftmr/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace ftmr {

namespace {

template <typename F>
std::uint64_t sum_steps(const std::vector<StepMetrics>& steps, F field) {
  std::uint64_t total = 0;
  for (const auto& s : steps) total += field(s);
  return total;
}

}  // namespace

std::uint64_t Metrics::network_total() const {
  return sum_steps(steps, [](const StepMetrics& s) { return s.network_bytes; });
}
std::uint64_t Metrics::self_total() const {
  return sum_steps(steps, [](const StepMetrics& s) { return s.self_bytes; });
}
std::uint64_t Metrics::backup_total() const {
  return sum_steps(steps, [](const StepMetrics& s) { return s.backup_bytes; });
}
std::uint64_t Metrics::records_total() const {
  return sum_steps(steps, [](const StepMetrics& s) { return s.records; });
}
std::uint64_t Metrics::map_calls_total() const {
  return sum_steps(steps, [](const StepMetrics& s) { return s.map_calls; });
}
std::uint64_t Metrics::reduce_calls_total() const {
  return sum_steps(steps, [](const StepMetrics& s) { return s.reduce_calls; });
}

double Metrics::overhead_ratio() const {
  const auto net = network_total();
  return net == 0 ? 0.0 : static_cast<double>(backup_total()) / static_cast<double>(net);
}

double Metrics::backup_imbalance() const {
  double worst = 0.0;
  for (const auto& s : steps) {
    std::uint64_t sum = 0, max = 0, n = 0;
    for (auto b : s.backup_received) {
      if (b == 0) continue;
      sum += b;
      max = std::max(max, b);
      ++n;
    }
    if (n == 0) continue;
    const double mean = static_cast<double>(sum) / static_cast<double>(n);
    worst = std::max(worst, static_cast<double>(max) / mean);
  }
  return worst;
}

std::string metrics_csv(const Metrics& m) {
  std::ostringstream out;
  out << kMetricsCsvHeader << '\n';
  for (const auto& s : m.steps) {
    out << s.step.value << ",shuffle," << s.network_bytes << ',' << s.self_bytes << ','
        << s.backup_bytes << ',' << s.records << '\n';
    for (const auto& r : m.recoveries) {
      if (r.step != s.step) continue;
      out << r.step.value << ",recovery," << r.bytes_resent << ",0,0," << r.records_resent
          << '\n';
    }
  }
  return out.str();
}

}  // namespace ftmr
