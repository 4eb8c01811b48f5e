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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "kiss/types.hpp"

namespace kiss {

enum class PolicyKind : std::uint8_t { Lru, GreedyDual, Frequency };

// Config names: lru, gd, freq.
std::string_view to_string(PolicyKind kind);
// Throws ConfigError for unknown names.
PolicyKind parse_policy(std::string_view name);

using ContainerId = std::uint64_t;

struct ContainerMeta {
  ContainerId container_id = 0;
  std::string function_id;
  double memory_mb = 0.0;
  // Eviction cost: the init latency paid to create this container.
  std::int64_t cold_init_ms = 0;
  TimeMs last_access_ms = 0;
  std::int64_t access_count = 0;
  double gd_priority = 0.0;
};

// Eviction ranking for one pool. Tracks metadata of every resident container
// and keeps the idle ones in an ordered index so the engine can pick a victim
// in O(log n). Never shared between pools.
//
// Victim order (smallest first, ties by smallest container id):
//   Lru        - last_access_ms
//   Frequency  - access_count
//   GreedyDual - gd_priority = clock + access_count * cold_init_ms / memory_mb,
//                and evicting raises the clock to the victim's priority.
class ReplacementPolicy {
 public:
  explicit ReplacementPolicy(PolicyKind kind) : kind_(kind) {}

  PolicyKind kind() const { return kind_; }
  double inflation_clock() const { return clock_; }

  // Starts tracking a new (busy) container. Throws ContractViolation on a
  // duplicate id. The stored meta has its policy fields reset.
  const ContainerMeta& on_insert(ContainerMeta meta, TimeMs now_ms);

  // Records a warm reuse. Throws ContractViolation for unknown ids.
  const ContainerMeta& on_hit(ContainerId id, TimeMs now_ms);

  // Min-scan over the candidates' own fields. For GreedyDual the clock is
  // raised to the chosen priority. Throws ContractViolation when empty.
  ContainerId select_victim(std::span<const ContainerMeta> idle_candidates);

  void mark_idle(ContainerId id);
  void mark_busy(ContainerId id);
  std::size_t idle_count() const { return idle_.size(); }
  bool is_idle(ContainerId id) const;

  // Indexed victim choice over the idle set; same order as select_victim.
  std::optional<ContainerId> peek_victim() const;

  // Removes the indexed victim from tracking and returns it.
  ContainerId evict_victim();

  const ContainerMeta& meta(ContainerId id) const;
  bool tracks(ContainerId id) const { return metas_.contains(id); }
  std::size_t size() const { return metas_.size(); }

  // Ranking key of a meta under this policy.
  double rank_of(const ContainerMeta& meta) const;

 private:
  struct Entry {
    ContainerMeta meta;
    bool idle = false;
  };

  double priority_for(const ContainerMeta& meta) const;
  Entry& entry(ContainerId id);

  PolicyKind kind_;
  double clock_ = 0.0;
  std::unordered_map<ContainerId, Entry> metas_;
  std::set<std::pair<double, ContainerId>> idle_;
};

}  // namespace kiss
