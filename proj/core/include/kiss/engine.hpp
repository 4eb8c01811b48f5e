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

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kiss/policies.hpp"
#include "kiss/types.hpp"

namespace kiss {

enum class ContainerState : std::uint8_t { Initializing, Running, Idle };

struct Container {
  ContainerId container_id = 0;
  std::string function_id;
  double memory_mb = 0.0;
  SizeClass size_class = SizeClass::Small;
  bool idle = false;
  // End of initialization; equals the start time for warm reuse.
  TimeMs ready_at_ms = 0;
  TimeMs busy_until_ms = 0;

  ContainerState state_at(TimeMs now) const {
    if (idle) return ContainerState::Idle;
    return now < ready_at_ms ? ContainerState::Initializing : ContainerState::Running;
  }
};

enum class Outcome : std::uint8_t { Hit, Miss, Drop };
std::string_view to_string(Outcome outcome);

// Raw counters for one size class (or a whole pool).
struct ClassCounters {
  std::int64_t total_accesses = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t drops = 0;
  // Drops whose request alone exceeded the pool capacity.
  std::int64_t oversized_drops = 0;
  // Sum over serviced invocations of (init if cold) + warm duration.
  std::int64_t execution_duration_ms = 0;

  ClassCounters& operator+=(const ClassCounters& o);
  friend bool operator==(const ClassCounters&, const ClassCounters&) = default;
};

struct PoolConfig {
  std::string label = "unified";
  double capacity_mb = 0.0;
  PolicyKind policy = PolicyKind::Lru;
};

struct PoolCounters {
  PoolConfig config;
  ClassCounters counters;
  std::int64_t evictions = 0;
  double peak_resident_mb = 0.0;
};

struct RunCounters {
  std::array<ClassCounters, 2> per_class{};
  std::vector<PoolCounters> pools;

  const ClassCounters& of(SizeClass c) const { return per_class[static_cast<std::size_t>(c)]; }
  ClassCounters overall() const;
  std::int64_t evictions() const;
};

// A memory-budgeted set of containers under one replacement policy.
// Memory is accounted in integer thousandths of a MB so capacity checks are
// exact.
class WarmPool {
 public:
  struct Admission {
    Outcome outcome = Outcome::Drop;
    ContainerId container_id = 0;
    TimeMs busy_until_ms = 0;
    bool oversized = false;
    // Containers evicted while making room; valid until the next admit().
    std::span<const Container> evicted;
  };

  explicit WarmPool(PoolConfig config, double threshold_mb = kDefaultThresholdMb);

  // Arrival handling: warm hit on the most recently used idle container of
  // the function, else evict idle containers in policy order until the
  // request fits and cold-start, else drop. Evictions made before a drop
  // are kept.
  Admission admit(const Invocation& invocation, TimeMs now_ms);

  // Busy -> Idle. Throws ConsistencyError for unknown or already idle ids.
  void complete(ContainerId id, TimeMs now_ms);

  const PoolConfig& config() const { return config_; }
  double capacity_mb() const { return config_.capacity_mb; }
  double resident_mb() const { return static_cast<double>(used_units_) / kUnitsPerMb; }
  double free_mb() const { return static_cast<double>(capacity_units_ - used_units_) / kUnitsPerMb; }
  std::size_t container_count() const { return containers_.size(); }
  std::size_t idle_count() const { return policy_.idle_count(); }
  const ReplacementPolicy& policy() const { return policy_; }
  const std::unordered_map<ContainerId, Container>& containers() const { return containers_; }
  const PoolCounters& counters() const { return counters_; }

  // Recomputes resident memory from scratch and checks it against the
  // running total and the capacity. Throws ConsistencyError.
  void check_invariants() const;

  static constexpr double kUnitsPerMb = 1000.0;
  static std::int64_t to_units(double mb);

 private:
  struct IdleSet {
    // (last_access_ms, id); the back is the most recently used.
    std::set<std::pair<TimeMs, ContainerId>> idle;
  };

  void evict_one(TimeMs now_ms);

  PoolConfig config_;
  double threshold_mb_;
  std::int64_t capacity_units_;
  std::int64_t used_units_ = 0;
  ContainerId next_id_ = 1;
  ReplacementPolicy policy_;
  std::unordered_map<ContainerId, Container> containers_;
  std::unordered_map<std::string, IdleSet> idle_by_function_;
  std::vector<Container> evicted_scratch_;
  PoolCounters counters_;
};

struct SimEvent {
  enum class Kind : std::uint8_t { Arrival, Completion };

  TimeMs time_ms = 0;
  Kind kind = Kind::Arrival;
  std::uint64_t sequence = 0;
  // Arrival payload.
  const Invocation* invocation = nullptr;
  // Completion payload.
  std::size_t pool = 0;
  ContainerId container_id = 0;
};

class Simulator;

// Called after every processed event (instrumentation hook).
using EventObserver = std::function<void(const Simulator&, const SimEvent&)>;
// Picks the pool index for an arrival.
using Router = std::function<std::size_t(const Invocation&)>;

struct EngineOptions {
  double threshold_mb = kDefaultThresholdMb;
  // JSON Lines event log, one record per arrival, completion and eviction.
  std::ostream* event_log = nullptr;
  EventObserver observer;
  // Recompute pool memory after every event (slow; for tests).
  bool paranoid = false;
};

// Single-threaded discrete-event loop over one or more independent pools.
// Events run in (time, sequence) order, except that completions due at or
// before an arrival's timestamp are processed before that arrival.
class Simulator {
 public:
  Simulator(std::vector<PoolConfig> pools, Router router, EngineOptions options = {});

  // Processes all arrivals and the completions they induce. Throws
  // ContractViolation if the trace is not sorted by timestamp.
  void run(std::span<const Invocation> events);

  // Processes one event. Arrivals schedule their completion internally.
  // Throws ContractViolation if the event is in the past.
  void step(const SimEvent& event);

  // Processes every pending completion due at or before `time_ms`.
  void advance_to(TimeMs time_ms);
  // Processes all pending completions.
  void drain();

  SimEvent make_arrival(const Invocation& invocation);

  TimeMs now() const { return now_; }
  std::size_t pending_completions() const { return completions_.size(); }
  const std::vector<WarmPool>& pools() const { return pools_; }
  RunCounters counters() const;

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
      return a.sequence > b.sequence;
    }
  };

  void on_arrival(const SimEvent& event);
  void on_completion(const SimEvent& event);

  std::vector<WarmPool> pools_;
  Router router_;
  EngineOptions options_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> completions_;
  std::array<ClassCounters, 2> per_class_{};
  TimeMs now_ = 0;
  std::uint64_t sequence_ = 0;
};

// Runs `events` through a single pool.
RunCounters run_single_pool(std::span<const Invocation> events, const PoolConfig& pool,
                            const EngineOptions& options = {});

// Classical size-aware cache: every access is instantaneous, so nothing is
// ever busy and only capacity shapes the hit count.
RunCounters run_pure_caching(std::span<const Invocation> events, double capacity_mb, PolicyKind policy,
                             double threshold_mb = kDefaultThresholdMb);

}  // namespace kiss
