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
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace kiss {

using TimeMs = std::int64_t;

inline constexpr double kDefaultThresholdMb = 225.0;
inline constexpr double kMbPerGb = 1024.0;

enum class SizeClass : std::uint8_t { Small = 0, Large = 1 };

inline constexpr std::string_view to_string(SizeClass c) {
  return c == SizeClass::Small ? "small" : "large";
}

// Memory exactly at the threshold is Small.
inline constexpr SizeClass size_class_for(double memory_mb, double threshold_mb) {
  return memory_mb <= threshold_mb ? SizeClass::Small : SizeClass::Large;
}

// One application row from the memory CSV.
struct RawAppRecord {
  std::string app_id;
  double avg_app_memory_mb = 0.0;
};

// One function row, joined from the invocations and durations CSVs.
struct RawFunctionRecord {
  std::string function_id;
  std::string app_id;
  double avg_duration_ms = 0.0;
  std::vector<std::int64_t> per_minute_counts;
  // Set by the parser when every minute bucket is zero.
  bool zero_invocations = false;

  std::int64_t total_invocations() const {
    return std::accumulate(per_minute_counts.begin(), per_minute_counts.end(), std::int64_t{0});
  }
};

// One timestamped request, the unit the simulator consumes.
struct Invocation {
  TimeMs timestamp_ms = 0;
  std::string function_id;
  double memory_mb = 0.0;
  std::int64_t warm_duration_ms = 1;
  std::int64_t cold_init_ms = 0;

  friend bool operator==(const Invocation&, const Invocation&) = default;
};

}  // namespace kiss
