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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kiss/engine.hpp"
#include "kiss/policies.hpp"
#include "kiss/types.hpp"

namespace kiss {

// The six counters plus derived percentages.
//   cold_start_pct          = 100 * misses / serviceable   (headline)
//   cold_start_pct_of_total = 100 * misses / total
//   drop_pct                = 100 * drops / total
//   hit_rate_pct            = 100 * hits / total
// Each percentage is 0 when its denominator is 0.
struct MetricBlock {
  std::int64_t total_accesses = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t drops = 0;
  std::int64_t serviceable_accesses = 0;
  std::int64_t execution_duration_ms = 0;
  double cold_start_pct = 0.0;
  double cold_start_pct_of_total = 0.0;
  double drop_pct = 0.0;
  double hit_rate_pct = 0.0;

  friend bool operator==(const MetricBlock&, const MetricBlock&) = default;
};

struct PoolReport {
  std::string label;
  double capacity_mb = 0.0;
  PolicyKind policy = PolicyKind::Lru;
  MetricBlock metrics;
  std::int64_t evictions = 0;
  double peak_resident_mb = 0.0;
};

struct SimReport {
  MetricBlock overall;
  MetricBlock small;
  MetricBlock large;
  std::int64_t oversized_drops = 0;
  std::int64_t evictions = 0;
  std::vector<PoolReport> pools;

  const MetricBlock& of(SizeClass c) const { return c == SizeClass::Small ? small : large; }
};

// Throws ConsistencyError on negative counters or broken identities.
MetricBlock finalize(const ClassCounters& counters);
SimReport finalize(const RunCounters& counters);

nlohmann::ordered_json to_json(const MetricBlock& block);
nlohmann::ordered_json to_json(const SimReport& report);

// (baseline - variant) / baseline * 100; nullopt when the baseline is 0.
std::optional<double> relative_improvement_pct(double baseline, double variant);

using LabeledReport = std::pair<std::string, SimReport>;

struct ComparisonRow {
  std::string label;
  std::string scope;   // overall | small | large
  std::string metric;  // cold_start_pct | drop_pct | hit_rate_pct | execution_duration_ms
  double baseline = 0.0;
  double value = 0.0;
  std::optional<double> relative_improvement_pct;
};

struct ComparisonTable {
  std::string baseline_label;
  std::vector<ComparisonRow> rows;

  const ComparisonRow* find(std::string_view label, std::string_view scope, std::string_view metric) const;
};

// Compares every non-baseline report to the one labelled `baseline_label`.
// Throws ConfigError with fewer than two reports or no such label.
ComparisonTable compare(std::span<const LabeledReport> reports, std::string_view baseline_label = "baseline");

void write_comparison_csv(std::ostream& out, const ComparisonTable& table);
nlohmann::ordered_json to_json(const ComparisonTable& table);

// One plottable row of a memory sweep.
struct SweepRow {
  double memory_gb = 0.0;
  std::string mode;   // baseline | kiss
  std::string split;  // "80/20", or "-" for baseline
  std::string policy_small;
  std::string policy_large;
  SimReport report;
};

inline constexpr const char* kSweepCsvHeader =
    "memory_gb,mode,split,policy_small,policy_large,cold_start_pct,drop_pct,hit_rate_pct,"
    "small_cold_start_pct,large_cold_start_pct,small_drop_pct,large_drop_pct";

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace kiss
