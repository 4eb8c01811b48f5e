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

#include "kiss/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "kiss/errors.hpp"

namespace kiss {

namespace {

using Flat = std::map<std::string, std::pair<std::string, std::size_t>>;  // key -> (value, line)

void flatten(const nlohmann::json& j, const std::string& prefix, Flat& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, full, out);
    } else if (value.is_string()) {
      out[full] = {value.get<std::string>(), 0};
    } else if (value.is_number() || value.is_boolean()) {
      out[full] = {value.dump(), 0};
    } else {
      throw ConfigError("config key '" + full + "' must be a scalar");
    }
  }
}

Flat parse_ini(std::string_view text, const std::string& name) {
  Flat out;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = csv::trim(raw);
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = csv::trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = std::string(csv::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const auto key = csv::trim(line.substr(0, eq));
    auto value = csv::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    out[full] = {std::string(value), line_no};
  }
  return out;
}

double real_value(const std::string& where, const std::string& key, const std::string& value) {
  const auto v = csv::parse_real(value);
  if (!v) throw ConfigError(where + key + " expects a number, got '" + value + "'");
  return *v;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthesis config key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Baseline ? "baseline" : "kiss"; }

Mode parse_mode(std::string_view text) {
  if (text == "baseline" || text == "unified") return Mode::Baseline;
  if (text == "kiss") return Mode::Kiss;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected baseline or kiss)");
}

void ModeConfig::validate() const {
  if (mode == Mode::Kiss) {
    kiss().validate();
  } else {
    baseline().validate();
  }
}

KissConfig ModeConfig::kiss() const {
  return {total_memory_mb, split, threshold_mb, small_policy, large_policy};
}

BaselineConfig ModeConfig::baseline() const { return {total_memory_mb, unified_policy, threshold_mb}; }

ModeConfig parse_mode_config(std::string_view text, const std::string& name) {
  const auto first = csv::trim(text);
  Flat flat;
  if (!first.empty() && first.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(name + ": " + e.what());
    }
    flatten(j, "", flat);
  } else {
    flat = parse_ini(text, name);
  }

  ModeConfig c;
  for (const auto& [key, entry] : flat) {
    const auto& [value, line] = entry;
    const std::string where = line ? name + ":" + std::to_string(line) + ": " : name + ": ";
    try {
      if (key == "mode") {
        c.mode = parse_mode(value);
      } else if (key == "total_memory_mb") {
        c.total_memory_mb = real_value(where, key, value);
      } else if (key == "total_memory_gb") {
        c.total_memory_mb = real_value(where, key, value) * kMbPerGb;
      } else if (key == "split") {
        c.split = PoolSplit::parse(value);
      } else if (key == "threshold_mb") {
        c.threshold_mb = real_value(where, key, value);
      } else if (key == "policy.small") {
        c.small_policy = parse_policy(value);
      } else if (key == "policy.large") {
        c.large_policy = parse_policy(value);
      } else if (key == "policy.unified") {
        c.unified_policy = parse_policy(value);
      } else if (key == "seed") {
        const auto v = csv::parse_int(value);
        if (!v || *v < 0) throw ConfigError(where + "seed expects a non-negative integer");
        c.seed = static_cast<std::uint64_t>(*v);
      } else {
        throw ConfigError(where + "unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      throw ConfigError(msg.rfind(name, 0) == 0 ? msg : where + msg);
    }
  }
  c.validate();
  return c;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModeConfig load_mode_config(const std::filesystem::path& path) {
  return parse_mode_config(read_text_file(path), path.string());
}

nlohmann::ordered_json to_json(const ModeConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(c.mode);
  j["total_memory_mb"] = c.total_memory_mb;
  j["threshold_mb"] = c.threshold_mb;
  if (c.mode == Mode::Kiss) {
    j["split"] = c.split.label();
    j["policy"]["small"] = to_string(c.small_policy);
    j["policy"]["large"] = to_string(c.large_policy);
  } else {
    j["policy"]["unified"] = to_string(c.unified_policy);
  }
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

SynthesisConfig stress_synthesis_config() {
  SynthesisConfig c;
  c.small_count = 2000;
  c.large_count = 50;
  c.large_rate_per_min = 112.0;
  c.popularity_skew = 1.2;
  c.bursts.clear();
  return c;
}

SynthesisConfig synthesis_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synthesis config must be a JSON object");
  static const std::set<std::string> known{
      "preset", "horizon_ms", "small_memory_range_mb", "large_memory_range_mb", "small_count", "large_count",
      "frequency_ratio", "large_rate_per_min", "popularity_skew", "small_init_p85_ms", "large_init_p85_ms",
      "init_sigma", "small_warm_ms", "large_warm_ms", "bursts", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("synthesis config: unknown key '" + key + "'");
  }

  SynthesisConfig c;
  const auto preset = get_or<std::string>(j, "preset", "default");
  if (preset == "stress") {
    c = stress_synthesis_config();
  } else if (preset != "default") {
    throw ConfigError("synthesis config: unknown preset '" + preset + "'");
  }

  auto pair_of = [&](const char* key, auto& range) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("synthesis config: ") + key + " must be [lo, hi]");
    try {
      v.at(0).get_to(range.lo);
      v.at(1).get_to(range.hi);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("synthesis config key '") + key + "': " + e.what());
    }
  };
  c.horizon_ms = get_or(j, "horizon_ms", c.horizon_ms);
  pair_of("small_memory_range_mb", c.small_memory_range_mb);
  pair_of("large_memory_range_mb", c.large_memory_range_mb);
  c.small_count = get_or(j, "small_count", c.small_count);
  c.large_count = get_or(j, "large_count", c.large_count);
  c.frequency_ratio = get_or(j, "frequency_ratio", c.frequency_ratio);
  c.large_rate_per_min = get_or(j, "large_rate_per_min", c.large_rate_per_min);
  c.popularity_skew = get_or(j, "popularity_skew", c.popularity_skew);
  c.small_init_p85_ms = get_or(j, "small_init_p85_ms", c.small_init_p85_ms);
  c.large_init_p85_ms = get_or(j, "large_init_p85_ms", c.large_init_p85_ms);
  c.init_sigma = get_or(j, "init_sigma", c.init_sigma);
  pair_of("small_warm_ms", c.small_warm_ms);
  pair_of("large_warm_ms", c.large_warm_ms);
  c.seed = get_or(j, "seed", c.seed);
  if (j.contains("bursts")) {
    const auto& bursts = j.at("bursts");
    if (!bursts.is_array()) throw ConfigError("synthesis config: bursts must be an array");
    c.bursts.clear();
    for (const auto& b : bursts) {
      if (!b.is_object()) throw ConfigError("synthesis config: each burst must be an object");
      c.bursts.push_back({get_or<TimeMs>(b, "start_ms", 0), get_or<TimeMs>(b, "end_ms", 0),
                          get_or<double>(b, "multiplier", 1.0)});
    }
  }
  c.validate();
  return c;
}

SynthesisConfig load_synthesis_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return synthesis_config_from_json(j);
}

nlohmann::ordered_json to_json(const SynthesisConfig& c) {
  nlohmann::ordered_json j;
  j["horizon_ms"] = c.horizon_ms;
  j["small_memory_range_mb"] = {c.small_memory_range_mb.lo, c.small_memory_range_mb.hi};
  j["large_memory_range_mb"] = {c.large_memory_range_mb.lo, c.large_memory_range_mb.hi};
  j["small_count"] = c.small_count;
  j["large_count"] = c.large_count;
  j["frequency_ratio"] = c.frequency_ratio;
  j["large_rate_per_min"] = c.large_rate_per_min;
  j["popularity_skew"] = c.popularity_skew;
  j["small_init_p85_ms"] = c.small_init_p85_ms;
  j["large_init_p85_ms"] = c.large_init_p85_ms;
  j["init_sigma"] = c.init_sigma;
  j["small_warm_ms"] = {c.small_warm_ms.lo, c.small_warm_ms.hi};
  j["large_warm_ms"] = {c.large_warm_ms.lo, c.large_warm_ms.hi};
  j["bursts"] = nlohmann::ordered_json::array();
  for (const auto& b : c.bursts) {
    j["bursts"].push_back({{"start_ms", b.start_ms}, {"end_ms", b.end_ms}, {"multiplier", b.multiplier}});
  }
  j["seed"] = c.seed;
  return j;
}

}  // namespace kiss
