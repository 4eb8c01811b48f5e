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
#include <span>
#include <string>
#include <vector>

#include "kiss/types.hpp"

namespace kiss {

// Per-function share of its application's memory, weighted by run time:
//   app_memory_mb * function_duration_ms / application_duration_ms
// Throws DomainError for non-positive inputs or a function duration longer
// than the application duration.
double estimate_function_memory(double app_memory_mb, double function_duration_ms,
                                double application_duration_ms);

struct FunctionProfile {
  std::string function_id;
  double est_memory_mb = 0.0;
  double avg_duration_ms = 0.0;
  std::int64_t total_invocations = 0;
  SizeClass size_class = SizeClass::Small;
};

// The application duration of each app is the sum of its functions'
// average durations, so the estimates of one app sum to its memory.
std::vector<FunctionProfile> build_profiles(const std::vector<RawAppRecord>& apps,
                                            const std::vector<RawFunctionRecord>& functions,
                                            double threshold_mb = kDefaultThresholdMb);

// Profiles for an already-expanded trace: memory and duration are the means
// over each function's invocations.
std::vector<FunctionProfile> profiles_from_events(std::span<const Invocation> events,
                                                  double threshold_mb = kDefaultThresholdMb);

struct PercentilePoint {
  double percentile = 0.0;
  double value = 0.0;

  friend bool operator==(const PercentilePoint&, const PercentilePoint&) = default;
};

// Percentiles strictly increasing, values non-decreasing.
struct PercentileTable {
  std::vector<PercentilePoint> rows;

  bool empty() const { return rows.empty(); }
  friend bool operator==(const PercentileTable&, const PercentileTable&) = default;
};

// 1, 5, 10, 15, ..., 95, 99, 100.
std::vector<double> default_percentiles();

// Nearest-rank: the value at sorted index ceil(p/100 * n) - 1 (index 0 for p = 0).
PercentileTable percentile_distribution(std::vector<double> values,
                                        std::span<const double> percentiles);

struct IatWindowConfig {
  TimeMs window_ms = 3'600'000;
  TimeMs overlap_ms = 1'800'000;
  double zscore_threshold = 3.0;

  void validate() const;
};

struct ClassIat {
  PercentileTable table;
  std::size_t retained = 0;
  std::size_t removed = 0;
  // Fewer than two events of this class: the table is empty.
  bool insufficient = false;
};

struct IatReport {
  ClassIat small;
  ClassIat large;

  const ClassIat& of(SizeClass c) const { return c == SizeClass::Small ? small : large; }
};

// Sliding-window inter-arrival analysis. Windows start at 0 and advance by
// window - overlap. Inside a window, IATs are gaps between consecutive
// invocations of the same function; per class, an IAT whose |z| against the
// window's mean and population standard deviation exceeds the threshold is
// dropped. Survivors from all windows are pooled per class. Events must be
// sorted by timestamp.
IatReport iat_analysis(std::span<const Invocation> events, const IatWindowConfig& config = {},
                       double threshold_mb = kDefaultThresholdMb,
                       std::span<const double> percentiles = {});

// Z-score filter applied to one window's IATs. Exposed for testing.
std::vector<double> zscore_filter(std::span<const double> values, double threshold);

struct FrequencyBucket {
  TimeMs bucket_start_ms = 0;
  std::int64_t small_count = 0;
  std::int64_t large_count = 0;
  double ratio = 0.0;
};

// Counts per bucket and class; ratio = small / max(large, 1). Functions
// without a profile are classified by invocation memory at the default
// threshold.
std::vector<FrequencyBucket> frequency_report(std::span<const Invocation> events,
                                              const std::vector<FunctionProfile>& profiles,
                                              TimeMs bucket_ms);

}  // namespace kiss
