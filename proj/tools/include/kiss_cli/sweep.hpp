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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kiss/config.hpp"
#include "kiss/metrics.hpp"

namespace kiss::cli {

// One column of a sweep: a mode with its split and policies. Baseline
// runs use `small_policy` as the unified policy.
struct SweepMode {
  Mode mode = Mode::Kiss;
  PoolSplit split;
  PolicyKind small_policy = PolicyKind::Lru;
  PolicyKind large_policy = PolicyKind::Lru;

  ModeConfig at(double memory_gb, double threshold_mb) const;
};

struct SweepSpec {
  std::vector<double> memory_points_gb;  // default 1..24
  std::vector<SweepMode> modes;          // default baseline LRU + kiss 80/20 LRU/LRU
  std::filesystem::path trace_path;      // empty: synthesize the default trace
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";
  double threshold_mb = kDefaultThresholdMb;
  unsigned jobs = 0;  // 0: hardware concurrency

  SweepSpec();
  // Throws ConfigError.
  void validate() const;
};

// {"memory_points_gb": [...], "modes": [{"mode": "kiss", "split": "80/20",
//  "policy_small": "lru", "policy_large": "gd"}, {"mode": "baseline",
//  "policy": "lru"}], "trace_path": ..., "seed": 42, "output_dir": ...}
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

// All nine {lru, gd, freq}^2 kiss pairs plus the three unified baselines.
std::vector<SweepMode> all_policy_modes(PoolSplit split = {});

struct SweepCell {
  double memory_gb = 0.0;
  SweepMode mode;
};

struct CellResult {
  SweepCell cell;
  std::optional<SweepRow> row;
  std::string error;  // set when the run threw
};

// Cells in (memory, mode) order.
std::vector<SweepCell> sweep_cells(const SweepSpec& spec);

// Runs every cell, fanning out over `jobs` worker threads. A failing cell is
// recorded and the others still run. Results come back in cell order.
std::vector<CellResult> run_cells(std::span<const Invocation> events, std::span<const SweepCell> cells,
                                  double threshold_mb, unsigned jobs);

SweepRow make_row(const SweepCell& cell, const SimReport& report);

}  // namespace kiss::cli
