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

#include "kiss_cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "kiss/errors.hpp"

namespace kiss::cli {

ModeConfig SweepMode::at(double memory_gb, double threshold_mb) const {
  ModeConfig c;
  c.mode = mode;
  c.total_memory_mb = memory_gb * kMbPerGb;
  c.split = split;
  c.threshold_mb = threshold_mb;
  c.small_policy = small_policy;
  c.large_policy = large_policy;
  c.unified_policy = small_policy;
  return c;
}

SweepSpec::SweepSpec() {
  for (int gb = 1; gb <= 24; ++gb) memory_points_gb.push_back(gb);
  modes.push_back({Mode::Baseline, {}, PolicyKind::Lru, PolicyKind::Lru});
  modes.push_back({Mode::Kiss, {}, PolicyKind::Lru, PolicyKind::Lru});
}

void SweepSpec::validate() const {
  if (memory_points_gb.empty()) throw ConfigError("sweep: memory_points_gb is empty");
  for (std::size_t i = 0; i < memory_points_gb.size(); ++i) {
    if (!(memory_points_gb[i] > 0)) throw ConfigError("sweep: memory points must be > 0");
    if (i > 0 && !(memory_points_gb[i] > memory_points_gb[i - 1])) {
      throw ConfigError("sweep: memory points must be strictly increasing");
    }
  }
  if (modes.empty()) throw ConfigError("sweep: at least one mode is required");
  for (const auto& m : modes) m.split.validate();
  if (!(threshold_mb > 0)) throw ConfigError("sweep: threshold_mb must be > 0");
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  SweepSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "memory_points_gb") {
        spec.memory_points_gb = value.get<std::vector<double>>();
      } else if (key == "modes") {
        spec.modes.clear();
        for (const auto& m : value) {
          SweepMode mode;
          mode.mode = parse_mode(m.at("mode").get<std::string>());
          if (m.contains("split")) mode.split = PoolSplit::parse(m.at("split").get<std::string>());
          if (m.contains("policy")) {
            mode.small_policy = mode.large_policy = parse_policy(m.at("policy").get<std::string>());
          }
          if (m.contains("policy_small")) mode.small_policy = parse_policy(m.at("policy_small").get<std::string>());
          if (m.contains("policy_large")) mode.large_policy = parse_policy(m.at("policy_large").get<std::string>());
          spec.modes.push_back(mode);
        }
      } else if (key == "trace_path") {
        spec.trace_path = value.get<std::string>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else if (key == "output_dir") {
        spec.output_dir = value.get<std::string>();
      } else if (key == "threshold_mb") {
        spec.threshold_mb = value.get<double>();
      } else if (key == "jobs") {
        spec.jobs = value.get<unsigned>();
      } else {
        throw ConfigError("sweep spec: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return sweep_spec_from_json(j);
}

std::vector<SweepMode> all_policy_modes(PoolSplit split) {
  constexpr PolicyKind kinds[] = {PolicyKind::Lru, PolicyKind::GreedyDual, PolicyKind::Frequency};
  std::vector<SweepMode> modes;
  for (const auto p : kinds) modes.push_back({Mode::Baseline, split, p, p});
  for (const auto s : kinds) {
    for (const auto l : kinds) modes.push_back({Mode::Kiss, split, s, l});
  }
  return modes;
}

std::vector<SweepCell> sweep_cells(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (const double gb : spec.memory_points_gb) {
    for (const auto& m : spec.modes) cells.push_back({gb, m});
  }
  return cells;
}

SweepRow make_row(const SweepCell& cell, const SimReport& report) {
  SweepRow row;
  row.memory_gb = cell.memory_gb;
  row.mode = std::string(to_string(cell.mode.mode));
  if (cell.mode.mode == Mode::Kiss) {
    row.split = cell.mode.split.label();
    row.policy_small = std::string(to_string(cell.mode.small_policy));
    row.policy_large = std::string(to_string(cell.mode.large_policy));
  } else {
    row.split = "-";
    row.policy_small = row.policy_large = std::string(to_string(cell.mode.small_policy));
  }
  row.report = report;
  return row;
}

std::vector<CellResult> run_cells(std::span<const Invocation> events, std::span<const SweepCell> cells,
                                  double threshold_mb, unsigned jobs) {
  std::vector<CellResult> results(cells.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& out = results[i];
      out.cell = cells[i];
      try {
        const auto config = cells[i].mode.at(cells[i].memory_gb, threshold_mb);
        const auto report = config.mode == Mode::Kiss ? route_and_run(events, config.kiss())
                                                      : run_baseline(events, config.baseline());
        out.row = make_row(cells[i], report);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace kiss::cli
