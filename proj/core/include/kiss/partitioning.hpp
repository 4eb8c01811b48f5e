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

#pragma once

#include <span>
#include <string>
#include <string_view>

#include "kiss/engine.hpp"
#include "kiss/metrics.hpp"
#include "kiss/policies.hpp"
#include "kiss/types.hpp"

namespace kiss {

// Small iff memory_mb <= threshold_mb.
SizeClass classify(const Invocation& invocation, double threshold_mb);

struct PoolSplit {
  double small_fraction = 0.8;
  double large_fraction = 0.2;

  // Accepts "80/20", "80-20" or "0.8/0.2". Throws ConfigError.
  static PoolSplit parse(std::string_view text);
  // "80/20" style label with percentages.
  std::string label() const;
  void validate() const;
};

// Two statically partitioned pools; the small pool takes small_fraction of
// the memory. Pools never lend capacity or containers to each other.
struct KissConfig {
  double total_memory_mb = 0.0;
  PoolSplit split;
  double threshold_mb = kDefaultThresholdMb;
  PolicyKind small_policy = PolicyKind::Lru;
  PolicyKind large_policy = PolicyKind::Lru;

  void validate() const;
  double small_capacity_mb() const { return total_memory_mb * split.small_fraction; }
  double large_capacity_mb() const { return total_memory_mb * split.large_fraction; }
};

// One unified pool; size classes are used for reporting only.
struct BaselineConfig {
  double total_memory_mb = 0.0;
  PolicyKind policy = PolicyKind::Lru;
  double threshold_mb = kDefaultThresholdMb;

  void validate() const;
};

// Hooks shared by both runners.
struct RunOptions {
  std::ostream* event_log = nullptr;
  EventObserver observer;
  bool paranoid = false;
};

// Pool indices used by route_and_run.
inline constexpr std::size_t kSmallPool = 0;
inline constexpr std::size_t kLargePool = 1;

SimReport route_and_run(std::span<const Invocation> events, const KissConfig& config,
                        const RunOptions& options = {});
SimReport run_baseline(std::span<const Invocation> events, const BaselineConfig& config,
                       const RunOptions& options = {});

// Same runs, returning raw counters.
RunCounters route_and_run_counters(std::span<const Invocation> events, const KissConfig& config,
                                   const RunOptions& options = {});
RunCounters run_baseline_counters(std::span<const Invocation> events, const BaselineConfig& config,
                                  const RunOptions& options = {});

}  // namespace kiss
