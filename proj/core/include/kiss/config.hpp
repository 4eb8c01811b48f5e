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
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "kiss/partitioning.hpp"
#include "kiss/policies.hpp"
#include "kiss/trace.hpp"

namespace kiss {

enum class Mode { Baseline, Kiss };

std::string_view to_string(Mode mode);
// "baseline" or "kiss". Throws ConfigError.
Mode parse_mode(std::string_view text);

// One simulation run. Read from INI-style text
//
//   mode = kiss
//   total_memory_mb = 8192
//   split = 80/20
//   [policy]
//   small = lru
//
// or from JSON with either dotted ("policy.small") or nested keys.
struct ModeConfig {
  Mode mode = Mode::Kiss;
  double total_memory_mb = 8 * kMbPerGb;
  PoolSplit split;
  double threshold_mb = kDefaultThresholdMb;
  PolicyKind small_policy = PolicyKind::Lru;
  PolicyKind large_policy = PolicyKind::Lru;
  PolicyKind unified_policy = PolicyKind::Lru;
  std::optional<std::uint64_t> seed;

  void validate() const;
  KissConfig kiss() const;
  BaselineConfig baseline() const;
};

// Throws ConfigError; the message names `name` and the line for INI input.
ModeConfig parse_mode_config(std::string_view text, const std::string& name = "config");
ModeConfig load_mode_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ModeConfig& config);

// Synthesis settings as JSON. Missing keys keep their defaults; an optional
// "preset": "default" | "stress" picks the starting point. Unknown keys are
// rejected.
SynthesisConfig synthesis_config_from_json(const nlohmann::json& j);
SynthesisConfig load_synthesis_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const SynthesisConfig& config);

// About four million invocations over two hours; overloads a 10 GB pool.
SynthesisConfig stress_synthesis_config();

// Reads a whole file. Throws ConfigError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace kiss
