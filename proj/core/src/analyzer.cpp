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

#include "kiss/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <map>
#include <string_view>
#include <unordered_map>

#include "kiss/errors.hpp"

namespace kiss {

double estimate_function_memory(double app_memory_mb, double function_duration_ms,
                                double application_duration_ms) {
  if (!(app_memory_mb > 0) || !(function_duration_ms > 0) || !(application_duration_ms > 0)) {
    throw DomainError("estimate_function_memory: arguments must be > 0");
  }
  if (function_duration_ms > application_duration_ms) {
    throw DomainError("estimate_function_memory: function duration exceeds application duration");
  }
  return app_memory_mb * function_duration_ms / application_duration_ms;
}

std::vector<FunctionProfile> build_profiles(const std::vector<RawAppRecord>& apps,
                                            const std::vector<RawFunctionRecord>& functions,
                                            double threshold_mb) {
  if (!(threshold_mb > 0)) throw DomainError("build_profiles: threshold must be > 0");
  std::unordered_map<std::string_view, double> app_memory;
  for (const auto& app : apps) app_memory.emplace(app.app_id, app.avg_app_memory_mb);
  std::unordered_map<std::string_view, double> app_duration;
  for (const auto& fn : functions) {
    if (!app_memory.contains(fn.app_id)) {
      throw IntegrityError("function " + fn.function_id + " references unknown app " + fn.app_id);
    }
    app_duration[fn.app_id] += fn.avg_duration_ms;
  }

  std::vector<FunctionProfile> profiles;
  profiles.reserve(functions.size());
  for (const auto& fn : functions) {
    const double total = app_duration[fn.app_id];
    if (!(total > 0)) throw DomainError("app " + fn.app_id + " has zero total duration");
    FunctionProfile p;
    p.function_id = fn.function_id;
    p.est_memory_mb = estimate_function_memory(app_memory[fn.app_id], fn.avg_duration_ms, total);
    p.avg_duration_ms = fn.avg_duration_ms;
    p.total_invocations = fn.total_invocations();
    p.size_class = size_class_for(p.est_memory_mb, threshold_mb);
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<FunctionProfile> profiles_from_events(std::span<const Invocation> events, double threshold_mb) {
  struct Acc {
    double memory = 0.0;
    double duration = 0.0;
    std::int64_t count = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& e : events) {
    auto& a = acc[e.function_id];
    a.memory += e.memory_mb;
    a.duration += static_cast<double>(e.warm_duration_ms);
    ++a.count;
  }
  std::vector<FunctionProfile> profiles;
  profiles.reserve(acc.size());
  for (const auto& [id, a] : acc) {
    const double n = static_cast<double>(a.count);
    profiles.push_back({id, a.memory / n, a.duration / n, a.count, size_class_for(a.memory / n, threshold_mb)});
  }
  return profiles;
}

std::vector<double> default_percentiles() {
  std::vector<double> p{1.0};
  for (int q = 5; q <= 95; q += 5) p.push_back(q);
  p.push_back(99.0);
  p.push_back(100.0);
  return p;
}

PercentileTable percentile_distribution(std::vector<double> values, std::span<const double> percentiles) {
  if (values.empty()) throw DomainError("percentile_distribution: empty input");
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    if (!(percentiles[i] >= 0.0 && percentiles[i] <= 100.0)) {
      throw DomainError("percentile_distribution: percentile outside [0, 100]");
    }
    if (i > 0 && !(percentiles[i] > percentiles[i - 1])) {
      throw DomainError("percentile_distribution: percentiles must be strictly increasing");
    }
  }
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  PercentileTable table;
  table.rows.reserve(percentiles.size());
  for (const double p : percentiles) {
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, n);
    table.rows.push_back({p, values[rank - 1]});
  }
  return table;
}

void IatWindowConfig::validate() const {
  if (!(overlap_ms > 0 && overlap_ms < window_ms)) throw ConfigError("IAT window needs 0 < overlap < window");
  if (!(zscore_threshold > 0)) throw ConfigError("IAT zscore_threshold must be > 0");
}

std::vector<double> zscore_filter(std::span<const double> values, double threshold) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (sd == 0.0) return {values.begin(), values.end()};
  std::vector<double> kept;
  kept.reserve(values.size());
  for (const double v : values) {
    if (std::abs(v - mean) / sd <= threshold) kept.push_back(v);
  }
  return kept;
}

IatReport iat_analysis(std::span<const Invocation> events, const IatWindowConfig& config, double threshold_mb,
                       std::span<const double> percentiles) {
  config.validate();
  const auto default_p = default_percentiles();
  if (percentiles.empty()) percentiles = default_p;

  IatReport report;
  std::array<std::size_t, 2> class_events{0, 0};
  for (const auto& e : events) ++class_events[static_cast<std::size_t>(size_class_for(e.memory_mb, threshold_mb))];
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].timestamp_ms < events[i - 1].timestamp_ms) {
      throw ContractViolation("iat_analysis: events must be sorted by timestamp");
    }
  }

  std::array<std::vector<double>, 2> pooled;
  std::array<std::size_t, 2> removed{0, 0};
  if (!events.empty()) {
    const TimeMs step = config.window_ms - config.overlap_ms;
    const TimeMs last = events.back().timestamp_ms;
    std::size_t first = 0;
    for (TimeMs start = 0; start <= last; start += step) {
      const TimeMs end = start + config.window_ms;
      while (first < events.size() && events[first].timestamp_ms < start) ++first;
      std::unordered_map<std::string_view, TimeMs> previous;
      std::array<std::vector<double>, 2> window_iats;
      for (std::size_t i = first; i < events.size() && events[i].timestamp_ms < end; ++i) {
        const auto& e = events[i];
        auto [it, fresh] = previous.try_emplace(e.function_id, e.timestamp_ms);
        if (!fresh) {
          const auto c = static_cast<std::size_t>(size_class_for(e.memory_mb, threshold_mb));
          window_iats[c].push_back(static_cast<double>(e.timestamp_ms - it->second));
          it->second = e.timestamp_ms;
        }
      }
      for (std::size_t c = 0; c < 2; ++c) {
        const auto kept = zscore_filter(window_iats[c], config.zscore_threshold);
        removed[c] += window_iats[c].size() - kept.size();
        pooled[c].insert(pooled[c].end(), kept.begin(), kept.end());
      }
    }
  }

  for (std::size_t c = 0; c < 2; ++c) {
    ClassIat& out = c == 0 ? report.small : report.large;
    out.insufficient = class_events[c] < 2;
    out.removed = removed[c];
    out.retained = pooled[c].size();
    if (!pooled[c].empty()) out.table = percentile_distribution(std::move(pooled[c]), percentiles);
  }
  return report;
}

std::vector<FrequencyBucket> frequency_report(std::span<const Invocation> events,
                                              const std::vector<FunctionProfile>& profiles, TimeMs bucket_ms) {
  if (bucket_ms <= 0) throw DomainError("frequency_report: bucket_ms must be > 0");
  std::unordered_map<std::string_view, SizeClass> class_of;
  for (const auto& p : profiles) class_of.emplace(p.function_id, p.size_class);

  std::vector<FrequencyBucket> buckets;
  for (const auto& e : events) {
    const auto idx = static_cast<std::size_t>(e.timestamp_ms / bucket_ms);
    if (idx >= buckets.size()) {
      const auto old = buckets.size();
      buckets.resize(idx + 1);
      for (auto k = old; k < buckets.size(); ++k) buckets[k].bucket_start_ms = static_cast<TimeMs>(k) * bucket_ms;
    }
    const auto it = class_of.find(e.function_id);
    const SizeClass c = it != class_of.end() ? it->second : size_class_for(e.memory_mb, kDefaultThresholdMb);
    if (c == SizeClass::Small) {
      ++buckets[idx].small_count;
    } else {
      ++buckets[idx].large_count;
    }
  }
  for (auto& b : buckets) {
    b.ratio = static_cast<double>(b.small_count) / static_cast<double>(std::max<std::int64_t>(b.large_count, 1));
  }
  return buckets;
}

}  // namespace kiss
