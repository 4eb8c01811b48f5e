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

#include "kiss/policies.hpp"

#include "kiss/errors.hpp"

namespace kiss {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Lru:
      return "lru";
    case PolicyKind::GreedyDual:
      return "gd";
    case PolicyKind::Frequency:
      return "freq";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "lru") return PolicyKind::Lru;
  if (name == "gd") return PolicyKind::GreedyDual;
  if (name == "freq") return PolicyKind::Frequency;
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected lru, gd or freq)");
}

double ReplacementPolicy::priority_for(const ContainerMeta& meta) const {
  return clock_ + static_cast<double>(meta.access_count) * static_cast<double>(meta.cold_init_ms) / meta.memory_mb;
}

double ReplacementPolicy::rank_of(const ContainerMeta& meta) const {
  switch (kind_) {
    case PolicyKind::Lru:
      return static_cast<double>(meta.last_access_ms);
    case PolicyKind::Frequency:
      return static_cast<double>(meta.access_count);
    case PolicyKind::GreedyDual:
      return meta.gd_priority;
  }
  return 0.0;
}

ReplacementPolicy::Entry& ReplacementPolicy::entry(ContainerId id) {
  auto it = metas_.find(id);
  if (it == metas_.end()) throw ContractViolation("policy: unknown container " + std::to_string(id));
  return it->second;
}

const ContainerMeta& ReplacementPolicy::meta(ContainerId id) const {
  auto it = metas_.find(id);
  if (it == metas_.end()) throw ContractViolation("policy: unknown container " + std::to_string(id));
  return it->second.meta;
}

bool ReplacementPolicy::is_idle(ContainerId id) const {
  auto it = metas_.find(id);
  return it != metas_.end() && it->second.idle;
}

const ContainerMeta& ReplacementPolicy::on_insert(ContainerMeta meta, TimeMs now_ms) {
  if (metas_.contains(meta.container_id)) {
    throw ContractViolation("policy: container " + std::to_string(meta.container_id) + " already tracked");
  }
  if (!(meta.memory_mb > 0)) throw ContractViolation("policy: container memory must be > 0");
  meta.last_access_ms = now_ms;
  meta.access_count = 1;
  meta.gd_priority = priority_for(meta);
  auto [it, _] = metas_.emplace(meta.container_id, Entry{std::move(meta), false});
  return it->second.meta;
}

const ContainerMeta& ReplacementPolicy::on_hit(ContainerId id, TimeMs now_ms) {
  Entry& e = entry(id);
  const bool was_idle = e.idle;
  if (was_idle) idle_.erase({rank_of(e.meta), id});
  e.meta.last_access_ms = now_ms;
  ++e.meta.access_count;
  e.meta.gd_priority = priority_for(e.meta);
  if (was_idle) idle_.emplace(rank_of(e.meta), id);
  return e.meta;
}

ContainerId ReplacementPolicy::select_victim(std::span<const ContainerMeta> idle_candidates) {
  if (idle_candidates.empty()) throw ContractViolation("policy: select_victim over no candidates");
  const ContainerMeta* best = &idle_candidates.front();
  for (const auto& c : idle_candidates.subspan(1)) {
    const double r = rank_of(c);
    const double br = rank_of(*best);
    if (r < br || (r == br && c.container_id < best->container_id)) best = &c;
  }
  if (kind_ == PolicyKind::GreedyDual && best->gd_priority > clock_) clock_ = best->gd_priority;
  return best->container_id;
}

void ReplacementPolicy::mark_idle(ContainerId id) {
  Entry& e = entry(id);
  if (e.idle) return;
  e.idle = true;
  idle_.emplace(rank_of(e.meta), id);
}

void ReplacementPolicy::mark_busy(ContainerId id) {
  Entry& e = entry(id);
  if (!e.idle) return;
  e.idle = false;
  idle_.erase({rank_of(e.meta), id});
}

std::optional<ContainerId> ReplacementPolicy::peek_victim() const {
  if (idle_.empty()) return std::nullopt;
  return idle_.begin()->second;
}

ContainerId ReplacementPolicy::evict_victim() {
  if (idle_.empty()) throw ContractViolation("policy: no idle container to evict");
  const auto [rank, id] = *idle_.begin();
  idle_.erase(idle_.begin());
  if (kind_ == PolicyKind::GreedyDual && rank > clock_) clock_ = rank;
  metas_.erase(id);
  return id;
}

}  // namespace kiss
