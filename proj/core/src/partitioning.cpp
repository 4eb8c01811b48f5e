// Copyright 2026 The kiss-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kiss/partitioning.hpp"

#include <cmath>

#include "csv.hpp"
#include "kiss/errors.hpp"
#include "kiss/trace.hpp"

namespace kiss {

SizeClass classify(const Invocation& invocation, double threshold_mb) {
  return size_class_for(invocation.memory_mb, threshold_mb);
}

PoolSplit PoolSplit::parse(std::string_view text) {
  const auto sep = text.find_first_of("/-:");
  if (sep == std::string_view::npos) throw ConfigError("split must look like 80/20");
  const auto a = csv::parse_real(text.substr(0, sep));
  const auto b = csv::parse_real(text.substr(sep + 1));
  if (!a || !b) throw ConfigError("split must look like 80/20, got '" + std::string(text) + "'");
  const double sum = *a + *b;
  if (!(sum > 0)) throw ConfigError("split parts must be positive");
  // Percent notation (80/20) or fractions (0.8/0.2).
  const double scale = std::abs(sum - 100.0) < 1e-6 ? 100.0 : 1.0;
  PoolSplit split{*a / scale, *b / scale};
  split.validate();
  return split;
}

std::string PoolSplit::label() const {
  return format_real(std::round(small_fraction * 1000.0) / 10.0) + "/" +
         format_real(std::round(large_fraction * 1000.0) / 10.0);
}

void PoolSplit::validate() const {
  if (!(small_fraction > 0) || !(large_fraction > 0)) throw ConfigError("split fractions must be > 0");
  if (std::abs(small_fraction + large_fraction - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
}

void KissConfig::validate() const {
  if (!(total_memory_mb > 0) || !std::isfinite(total_memory_mb)) throw ConfigError("total_memory_mb must be > 0");
  if (!(threshold_mb > 0)) throw ConfigError("threshold_mb must be > 0");
  split.validate();
}

void BaselineConfig::validate() const {
  if (!(total_memory_mb > 0) || !std::isfinite(total_memory_mb)) throw ConfigError("total_memory_mb must be > 0");
  if (!(threshold_mb > 0)) throw ConfigError("threshold_mb must be > 0");
}

RunCounters route_and_run_counters(std::span<const Invocation> events, const KissConfig& config,
                                   const RunOptions& options) {
  config.validate();
  std::vector<PoolConfig> pools{
      {"small", config.small_capacity_mb(), config.small_policy},
      {"large", config.large_capacity_mb(), config.large_policy},
  };
  const double threshold = config.threshold_mb;
  Router router = [threshold](const Invocation& inv) {
    return classify(inv, threshold) == SizeClass::Small ? kSmallPool : kLargePool;
  };
  EngineOptions eo{threshold, options.event_log, options.observer, options.paranoid};
  Simulator sim(std::move(pools), std::move(router), std::move(eo));
  sim.run(events);
  return sim.counters();
}

RunCounters run_baseline_counters(std::span<const Invocation> events, const BaselineConfig& config,
                                  const RunOptions& options) {
  config.validate();
  EngineOptions eo{config.threshold_mb, options.event_log, options.observer, options.paranoid};
  return run_single_pool(events, {"unified", config.total_memory_mb, config.policy}, eo);
}

SimReport route_and_run(std::span<const Invocation> events, const KissConfig& config, const RunOptions& options) {
  return finalize(route_and_run_counters(events, config, options));
}

SimReport run_baseline(std::span<const Invocation> events, const BaselineConfig& config,
                       const RunOptions& options) {
  return finalize(run_baseline_counters(events, config, options));
}

}  // namespace kiss
