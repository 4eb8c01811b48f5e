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

#include "kiss/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "kiss/errors.hpp"

namespace kiss {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Hit:
      return "hit";
    case Outcome::Miss:
      return "miss";
    case Outcome::Drop:
      return "drop";
  }
  return "?";
}

ClassCounters& ClassCounters::operator+=(const ClassCounters& o) {
  total_accesses += o.total_accesses;
  hits += o.hits;
  misses += o.misses;
  drops += o.drops;
  oversized_drops += o.oversized_drops;
  execution_duration_ms += o.execution_duration_ms;
  return *this;
}

ClassCounters RunCounters::overall() const {
  ClassCounters sum = per_class[0];
  sum += per_class[1];
  return sum;
}

std::int64_t RunCounters::evictions() const {
  std::int64_t n = 0;
  for (const auto& p : pools) n += p.evictions;
  return n;
}

std::int64_t WarmPool::to_units(double mb) { return std::llround(mb * kUnitsPerMb); }

WarmPool::WarmPool(PoolConfig config, double threshold_mb)
    : config_(std::move(config)),
      threshold_mb_(threshold_mb),
      capacity_units_(to_units(config_.capacity_mb)),
      policy_(config_.policy) {
  if (!(config_.capacity_mb >= 0) || !std::isfinite(config_.capacity_mb)) {
    throw ConfigError("pool capacity must be finite and >= 0");
  }
  counters_.config = config_;
}

void WarmPool::evict_one(TimeMs now_ms) {
  const ContainerId victim = *policy_.peek_victim();
  const TimeMs last_access = policy_.meta(victim).last_access_ms;
  policy_.evict_victim();
  auto it = containers_.find(victim);
  if (it == containers_.end()) throw ConsistencyError("evicted container missing from pool");
  Container& c = it->second;
  if (!c.idle || c.busy_until_ms > now_ms) {
    throw ConsistencyError("attempted to evict busy container " + std::to_string(victim));
  }
  auto fn = idle_by_function_.find(c.function_id);
  if (fn == idle_by_function_.end() || fn->second.idle.erase({last_access, victim}) != 1) {
    throw ConsistencyError("idle index out of sync for container " + std::to_string(victim));
  }
  if (fn->second.idle.empty()) idle_by_function_.erase(fn);
  used_units_ -= to_units(c.memory_mb);
  evicted_scratch_.push_back(std::move(c));
  containers_.erase(it);
  ++counters_.evictions;
}

WarmPool::Admission WarmPool::admit(const Invocation& inv, TimeMs now_ms) {
  evicted_scratch_.clear();
  Admission result;
  ++counters_.counters.total_accesses;

  // Warm hit: most recently used idle container of this function.
  if (auto fn = idle_by_function_.find(inv.function_id); fn != idle_by_function_.end()) {
    auto& set = fn->second.idle;
    const auto mru = std::prev(set.end());
    const ContainerId id = mru->second;
    set.erase(mru);
    if (set.empty()) idle_by_function_.erase(fn);

    Container& c = containers_.at(id);
    c.idle = false;
    c.ready_at_ms = now_ms;
    c.busy_until_ms = now_ms + inv.warm_duration_ms;
    policy_.mark_busy(id);
    policy_.on_hit(id, now_ms);

    ++counters_.counters.hits;
    counters_.counters.execution_duration_ms += inv.warm_duration_ms;
    result.outcome = Outcome::Hit;
    result.container_id = id;
    result.busy_until_ms = c.busy_until_ms;
    return result;
  }

  const std::int64_t required = to_units(inv.memory_mb);
  if (required > capacity_units_) {
    ++counters_.counters.drops;
    ++counters_.counters.oversized_drops;
    result.outcome = Outcome::Drop;
    result.oversized = true;
    return result;
  }

  while (capacity_units_ - used_units_ < required && policy_.idle_count() > 0) evict_one(now_ms);
  result.evicted = evicted_scratch_;

  if (capacity_units_ - used_units_ < required) {
    ++counters_.counters.drops;
    result.outcome = Outcome::Drop;
    return result;
  }

  Container c;
  c.container_id = next_id_++;
  c.function_id = inv.function_id;
  c.memory_mb = inv.memory_mb;
  c.size_class = size_class_for(inv.memory_mb, threshold_mb_);
  c.idle = false;
  c.ready_at_ms = now_ms + inv.cold_init_ms;
  c.busy_until_ms = c.ready_at_ms + inv.warm_duration_ms;

  ContainerMeta meta;
  meta.container_id = c.container_id;
  meta.function_id = inv.function_id;
  meta.memory_mb = inv.memory_mb;
  meta.cold_init_ms = inv.cold_init_ms;
  policy_.on_insert(std::move(meta), now_ms);

  used_units_ += required;
  counters_.peak_resident_mb = std::max(counters_.peak_resident_mb, resident_mb());
  ++counters_.counters.misses;
  counters_.counters.execution_duration_ms += inv.cold_init_ms + inv.warm_duration_ms;
  result.outcome = Outcome::Miss;
  result.container_id = c.container_id;
  result.busy_until_ms = c.busy_until_ms;
  containers_.emplace(c.container_id, std::move(c));
  return result;
}

void WarmPool::complete(ContainerId id, TimeMs now_ms) {
  auto it = containers_.find(id);
  if (it == containers_.end()) {
    throw ConsistencyError("completion for unknown container " + std::to_string(id));
  }
  Container& c = it->second;
  if (c.idle) throw ConsistencyError("completion for idle container " + std::to_string(id));
  if (c.busy_until_ms > now_ms) throw ConsistencyError("completion before busy_until for " + std::to_string(id));
  c.idle = true;
  policy_.mark_idle(id);
  idle_by_function_[c.function_id].idle.emplace(policy_.meta(id).last_access_ms, id);
}

void WarmPool::check_invariants() const {
  std::int64_t sum = 0;
  for (const auto& [id, c] : containers_) {
    sum += to_units(c.memory_mb);
    if (!policy_.tracks(id)) throw ConsistencyError("container not tracked by policy");
    if (policy_.is_idle(id) != c.idle) throw ConsistencyError("policy idle state out of sync");
  }
  if (sum != used_units_) throw ConsistencyError("resident memory accounting drifted");
  if (used_units_ > capacity_units_) throw ConsistencyError("resident memory exceeds capacity");
  if (policy_.size() != containers_.size()) throw ConsistencyError("policy tracks stale containers");
}

Simulator::Simulator(std::vector<PoolConfig> pools, Router router, EngineOptions options)
    : router_(std::move(router)), options_(std::move(options)) {
  if (pools.empty()) throw ConfigError("simulator needs at least one pool");
  pools_.reserve(pools.size());
  for (auto& p : pools) pools_.emplace_back(std::move(p), options_.threshold_mb);
  if (!router_) router_ = [](const Invocation&) { return std::size_t{0}; };
}

SimEvent Simulator::make_arrival(const Invocation& invocation) {
  SimEvent e;
  e.time_ms = invocation.timestamp_ms;
  e.kind = SimEvent::Kind::Arrival;
  e.sequence = sequence_++;
  e.invocation = &invocation;
  return e;
}

namespace {

void log_record(std::ostream& out, TimeMs time, std::string_view kind, const std::string& function_id,
                std::string_view outcome, ContainerId container, const std::string& pool) {
  nlohmann::ordered_json j;
  j["time_ms"] = time;
  j["kind"] = kind;
  j["function_id"] = function_id;
  j["outcome"] = outcome;
  if (container != 0) j["container_id"] = container;
  j["pool"] = pool;
  out << j.dump() << '\n';
}

}  // namespace

void Simulator::on_arrival(const SimEvent& event) {
  const Invocation& inv = *event.invocation;
  if (!(inv.memory_mb > 0) || inv.warm_duration_ms < 1 || inv.cold_init_ms < 0) {
    throw ContractViolation("invalid invocation for function " + inv.function_id);
  }
  const std::size_t pool_index = router_(inv);
  if (pool_index >= pools_.size()) throw ConsistencyError("router returned unknown pool");
  WarmPool& pool = pools_[pool_index];
  const auto admission = pool.admit(inv, event.time_ms);

  auto& cls = per_class_[static_cast<std::size_t>(size_class_for(inv.memory_mb, options_.threshold_mb))];
  ++cls.total_accesses;
  switch (admission.outcome) {
    case Outcome::Hit:
      ++cls.hits;
      cls.execution_duration_ms += inv.warm_duration_ms;
      break;
    case Outcome::Miss:
      ++cls.misses;
      cls.execution_duration_ms += inv.cold_init_ms + inv.warm_duration_ms;
      break;
    case Outcome::Drop:
      ++cls.drops;
      if (admission.oversized) ++cls.oversized_drops;
      break;
  }

  if (options_.event_log != nullptr) {
    for (const auto& victim : admission.evicted) {
      log_record(*options_.event_log, event.time_ms, "eviction", victim.function_id, "evict", victim.container_id,
                 pool.config().label);
    }
    log_record(*options_.event_log, event.time_ms, "arrival", inv.function_id, to_string(admission.outcome),
               admission.container_id, pool.config().label);
  }

  if (admission.outcome != Outcome::Drop) {
    SimEvent done;
    done.time_ms = admission.busy_until_ms;
    done.kind = SimEvent::Kind::Completion;
    done.sequence = sequence_++;
    done.pool = pool_index;
    done.container_id = admission.container_id;
    completions_.push(done);
  }
}

void Simulator::on_completion(const SimEvent& event) {
  if (event.pool >= pools_.size()) throw ConsistencyError("completion for unknown pool");
  WarmPool& pool = pools_[event.pool];
  const auto it = pool.containers().find(event.container_id);
  if (it == pool.containers().end()) {
    throw ConsistencyError("completion for unknown container " + std::to_string(event.container_id));
  }
  if (options_.event_log != nullptr) {
    log_record(*options_.event_log, event.time_ms, "completion", it->second.function_id, "complete",
               event.container_id, pool.config().label);
  }
  pool.complete(event.container_id, event.time_ms);
}

void Simulator::step(const SimEvent& event) {
  if (event.time_ms < now_) {
    throw ContractViolation("event at " + std::to_string(event.time_ms) + " precedes clock " + std::to_string(now_));
  }
  now_ = event.time_ms;
  if (event.kind == SimEvent::Kind::Arrival) {
    if (event.invocation == nullptr) throw ContractViolation("arrival without invocation");
    on_arrival(event);
  } else {
    on_completion(event);
  }
  if (options_.paranoid) {
    for (const auto& p : pools_) p.check_invariants();
  }
  if (options_.observer) options_.observer(*this, event);
}

void Simulator::advance_to(TimeMs time_ms) {
  while (!completions_.empty() && completions_.top().time_ms <= time_ms) {
    const SimEvent next = completions_.top();
    completions_.pop();
    step(next);
  }
}

void Simulator::drain() { advance_to(std::numeric_limits<TimeMs>::max()); }

void Simulator::run(std::span<const Invocation> events) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].timestamp_ms < events[i - 1].timestamp_ms) {
      throw ContractViolation("trace not sorted by timestamp at index " + std::to_string(i));
    }
  }
  for (const auto& inv : events) {
    advance_to(inv.timestamp_ms);
    step(make_arrival(inv));
  }
  drain();
}

RunCounters Simulator::counters() const {
  RunCounters rc;
  rc.per_class = per_class_;
  for (const auto& p : pools_) rc.pools.push_back(p.counters());
  return rc;
}

RunCounters run_single_pool(std::span<const Invocation> events, const PoolConfig& pool,
                            const EngineOptions& options) {
  Simulator sim({pool}, nullptr, options);
  sim.run(events);
  return sim.counters();
}

RunCounters run_pure_caching(std::span<const Invocation> events, double capacity_mb, PolicyKind policy,
                             double threshold_mb) {
  WarmPool pool({"cache", capacity_mb, policy}, threshold_mb);
  RunCounters rc;
  TimeMs last = std::numeric_limits<TimeMs>::min();
  for (const auto& inv : events) {
    if (inv.timestamp_ms < last) throw ContractViolation("trace not sorted by timestamp");
    last = inv.timestamp_ms;
    Invocation instant = inv;
    instant.warm_duration_ms = 0;
    instant.cold_init_ms = 0;
    const auto admission = pool.admit(instant, inv.timestamp_ms);
    auto& cls = rc.per_class[static_cast<std::size_t>(size_class_for(inv.memory_mb, threshold_mb))];
    ++cls.total_accesses;
    switch (admission.outcome) {
      case Outcome::Hit:
        ++cls.hits;
        break;
      case Outcome::Miss:
        ++cls.misses;
        break;
      case Outcome::Drop:
        ++cls.drops;
        if (admission.oversized) ++cls.oversized_drops;
        break;
    }
    if (admission.outcome != Outcome::Drop) pool.complete(admission.container_id, inv.timestamp_ms);
  }
  rc.pools.push_back(pool.counters());
  return rc;
}

}  // namespace kiss
