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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kiss/analyzer.hpp"
#include "kiss/config.hpp"

namespace kiss::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags or config
  kExitData = 2,      // unreadable or malformed input
  kExitInternal = 3,  // consistency violation or failed sweep cell
};

enum class Format { Json, Csv };
Format parse_format(std::string_view text);

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  bool event_log = false;
  Format format = Format::Json;

  std::filesystem::path out_or(const std::filesystem::path& fallback) const { return out_dir.value_or(fallback); }
};

struct AnalyzeOptions {
  std::filesystem::path invocations;
  std::filesystem::path durations;
  std::filesystem::path memory;
  std::filesystem::path events;  // canonical event file instead of the three CSVs
  double threshold_mb = kDefaultThresholdMb;
  TimeMs bucket_ms = 60000;
  IatWindowConfig iat;
};

struct SynthesizeOptions {
  std::string preset = "default";  // used when no --config is given
  std::filesystem::path output;    // empty: <out>/trace-<hash>.csv
};

struct SimulateOptions {
  std::filesystem::path trace;
  std::optional<Mode> mode;
  std::optional<double> memory_mb;
  std::optional<std::string> split;
  std::optional<double> threshold_mb;
  std::optional<std::string> policy_small;
  std::optional<std::string> policy_large;
  std::optional<std::string> policy_unified;
  bool paranoid = false;
};

struct SweepOptions {
  std::filesystem::path trace;
  std::vector<double> memory_points_gb;  // empty: 1..24 GB
  bool all_policies = false;
  std::optional<unsigned> jobs;
};

struct StressOptions {
  std::filesystem::path trace;  // empty: synthesize the stress preset
  double memory_gb = 10.0;
};

int cmd_analyze(const GlobalOptions& global, const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_synthesize(const GlobalOptions& global, const SynthesizeOptions& options, std::ostream& out,
                   std::ostream& err);
int cmd_simulate(const GlobalOptions& global, const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const GlobalOptions& global, const SweepOptions& options, std::ostream& out, std::ostream& err);
int cmd_stress(const GlobalOptions& global, const StressOptions& options, std::ostream& out, std::ostream& err);

// Runs `body`, turning exceptions into a message on `err` and an exit code.
int guarded(std::ostream& err, const std::function<int()>& body);

// 64-bit FNV-1a as 16 hex digits; names output files after their config.
std::string config_hash(std::string_view text);

}  // namespace kiss::cli
