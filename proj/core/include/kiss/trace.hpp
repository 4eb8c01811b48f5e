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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kiss/types.hpp"

namespace kiss {

class Rng;

struct RawTrace {
  std::vector<RawAppRecord> apps;
  std::vector<RawFunctionRecord> functions;
};

// Reads the three Azure-style CSVs:
//   invocations: function_id,app_id,m0,m1,...
//   durations:   function_id,avg_duration_ms
//   memory:      app_id,avg_app_memory_mb
// Throws ParseError (with file and line) on malformed rows and
// IntegrityError when a function references an unknown app or has no
// duration row.
RawTrace parse_raw_trace(const std::filesystem::path& invocations_path,
                         const std::filesystem::path& durations_path,
                         const std::filesystem::path& memory_path);

// Stream overload; the names are used only in error messages.
RawTrace parse_raw_trace(std::istream& invocations, std::istream& durations, std::istream& memory,
                         const std::string& invocations_name = "invocations",
                         const std::string& durations_name = "durations",
                         const std::string& memory_name = "memory");

// Heavy-tailed cold-start latency: log-normal truncated at twice its 85th
// percentile, with the location solved so the truncated distribution's
// 85th percentile equals `p85_ms`.
class InitLatencySampler {
 public:
  InitLatencySampler(double p85_ms, double sigma);

  std::int64_t sample(Rng& rng) const;

  double p85_ms() const { return p85_ms_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double cap_ms() const { return 2.0 * p85_ms_; }

 private:
  double p85_ms_;
  double sigma_;
  double mu_;
};

inline constexpr double kDefaultInitSigma = 1.0;

// Knobs for turning per-minute counts into events. The Azure data carries
// no init latencies, so these are synthesized per size class.
struct ExpansionOptions {
  double threshold_mb = kDefaultThresholdMb;
  double small_init_p85_ms = 15000;
  double large_init_p85_ms = 100000;
  double init_sigma = kDefaultInitSigma;
};

// Places each minute bucket's k invocations uniformly inside that minute.
// Memory comes from the per-function estimate; output is sorted by
// (timestamp, function_id).
std::vector<Invocation> expand_counts_to_events(const std::vector<RawFunctionRecord>& functions,
                                                const std::vector<RawAppRecord>& apps,
                                                std::uint64_t seed,
                                                const ExpansionOptions& options = {});

struct MemoryRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct DurationRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct BurstWindow {
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  double multiplier = 1.0;
};

struct SynthesisConfig {
  TimeMs horizon_ms = 2 * 60 * 60 * 1000;
  MemoryRange small_memory_range_mb{30.0, 60.0};
  MemoryRange large_memory_range_mb{300.0, 400.0};
  int small_count = 134;
  int large_count = 1;
  // Aggregate small-to-large invocation volume.
  double frequency_ratio = 5.0;
  // Mean invocations per minute of an average large function.
  double large_rate_per_min = 13.95;
  // Zipf exponent of per-function popularity inside each class (0 = uniform).
  double popularity_skew = 0.65;
  std::int64_t small_init_p85_ms = 15000;
  std::int64_t large_init_p85_ms = 100000;
  double init_sigma = kDefaultInitSigma;
  DurationRange small_warm_ms{50, 500};
  DurationRange large_warm_ms{1000, 10000};
  // One 10 minute surge an hour in.
  std::vector<BurstWindow> bursts{{3600000, 4200000, 1.93}};
  std::uint64_t seed = 42;

  // Throws ConfigError.
  void validate() const;
};

// Builds an edge-scaled trace of `small_count` small and `large_count` large
// functions. Per-function invocation counts are fixed up front so that the
// class volumes match `frequency_ratio`; arrival times then follow the
// (burst-modulated) rate profile.
std::vector<Invocation> synthesize_edge_trace(const SynthesisConfig& config);

// Canonical event file: timestamp_ms,function_id,memory_mb,warm_duration_ms,cold_init_ms
void write_events(std::ostream& out, std::span<const Invocation> events);
void write_events(const std::filesystem::path& path, std::span<const Invocation> events);
std::vector<Invocation> read_events(std::istream& in, const std::string& name = "events");
std::vector<Invocation> read_events(const std::filesystem::path& path);

// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

}  // namespace kiss
