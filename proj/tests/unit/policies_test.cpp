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

#include <doctest.h>

#include "kiss/errors.hpp"
#include "kiss/policies.hpp"
#include "kiss/rng.hpp"
#include "simple_oracles.hpp"

using namespace kiss;

namespace {

ContainerMeta meta(ContainerId id, double mem = 100, std::int64_t init = 1000) {
  ContainerMeta m;
  m.container_id = id;
  m.function_id = "f" + std::to_string(id);
  m.memory_mb = mem;
  m.cold_init_ms = init;
  return m;
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(parse_policy("lru") == PolicyKind::Lru);
  CHECK(parse_policy("gd") == PolicyKind::GreedyDual);
  CHECK(parse_policy("freq") == PolicyKind::Frequency);
  CHECK(to_string(PolicyKind::GreedyDual) == "gd");
  CHECK_THROWS_AS(parse_policy("fifo"), ConfigError);
}

TEST_CASE("insert initializes policy fields") {
  ReplacementPolicy gd(PolicyKind::GreedyDual);
  CHECK(gd.on_insert(meta(1), 0).gd_priority == 10.0);
  ReplacementPolicy lru(PolicyKind::Lru);
  CHECK(lru.on_insert(meta(1), 5).last_access_ms == 5);
  ReplacementPolicy freq(PolicyKind::Frequency);
  CHECK(freq.on_insert(meta(1), 0).access_count == 1);
  CHECK_THROWS_AS(freq.on_insert(meta(1), 1), ContractViolation);
}

TEST_CASE("hits update policy fields") {
  ReplacementPolicy freq(PolicyKind::Frequency);
  freq.on_insert(meta(1), 0);
  freq.on_hit(1, 1);
  CHECK(freq.on_hit(1, 2).access_count == 3);

  ReplacementPolicy lru(PolicyKind::Lru);
  lru.on_insert(meta(1), 0);
  CHECK(lru.on_hit(1, 99).last_access_ms == 99);
  CHECK_THROWS_AS(lru.on_hit(7, 100), ContractViolation);
}

TEST_CASE("greedy dual priority uses the current clock") {
  ReplacementPolicy gd(PolicyKind::GreedyDual);
  // Priority 400/100 = 4; evicting it raises the clock to 4.
  gd.on_insert(meta(1, 100, 400), 0);
  gd.mark_idle(1);
  CHECK(gd.evict_victim() == 1);
  CHECK(gd.inflation_clock() == 4.0);
  gd.on_insert(meta(2, 100, 1000), 1);
  CHECK(gd.meta(2).gd_priority == 14.0);
  CHECK(gd.on_hit(2, 2).gd_priority == 24.0);
}

TEST_CASE("select_victim min-scans the candidates") {
  SUBCASE("lru") {
    ReplacementPolicy p(PolicyKind::Lru);
    std::vector<ContainerMeta> c{meta(1), meta(2), meta(3)};
    c[0].last_access_ms = 1;
    c[1].last_access_ms = 5;
    c[2].last_access_ms = 3;
    CHECK(p.select_victim(c) == 1);
  }
  SUBCASE("frequency tie goes to the smaller id") {
    ReplacementPolicy p(PolicyKind::Frequency);
    std::vector<ContainerMeta> c{meta(1), meta(2), meta(3)};
    c[0].access_count = 7;
    c[1].access_count = 2;
    c[2].access_count = 2;
    CHECK(p.select_victim(c) == 2);
  }
  SUBCASE("greedy dual raises the clock") {
    ReplacementPolicy p(PolicyKind::GreedyDual);
    std::vector<ContainerMeta> c{meta(1), meta(2)};
    c[0].gd_priority = 24;
    c[1].gd_priority = 10;
    CHECK(p.select_victim(c) == 2);
    CHECK(p.inflation_clock() == 10.0);
  }
  ReplacementPolicy p(PolicyKind::Lru);
  CHECK_THROWS_AS(p.select_victim({}), ContractViolation);
}

TEST_CASE("select_victim is deterministic") {
  ReplacementPolicy a(PolicyKind::Frequency), b(PolicyKind::Frequency);
  std::vector<ContainerMeta> c{meta(4), meta(9), meta(2)};
  for (auto& m : c) m.access_count = 3;
  CHECK(a.select_victim(c) == b.select_victim(c));
  CHECK(a.select_victim(c) == 2);
}

TEST_CASE("busy containers are not victims") {
  ReplacementPolicy p(PolicyKind::Lru);
  p.on_insert(meta(1), 0);
  p.on_insert(meta(2), 1);
  CHECK_FALSE(p.peek_victim().has_value());
  p.mark_idle(2);
  CHECK(p.peek_victim() == 2);
  p.mark_busy(2);
  p.mark_idle(1);
  CHECK(p.evict_victim() == 1);
  CHECK_FALSE(p.tracks(1));
}

TEST_CASE("eviction forgets frequency history") {
  ReplacementPolicy p(PolicyKind::Frequency);
  p.on_insert(meta(1), 0);
  p.on_hit(1, 1);
  p.on_hit(1, 2);
  p.mark_idle(1);
  p.evict_victim();
  CHECK(p.on_insert(meta(1), 3).access_count == 1);
}

TEST_CASE("indexed victims match the min-scan oracle") {
  for (const auto kind : {PolicyKind::Lru, PolicyKind::Frequency, PolicyKind::GreedyDual}) {
    Rng rng(static_cast<std::uint64_t>(kind) + 11);
    ReplacementPolicy p(kind);
    ContainerId next = 1;
    std::vector<ContainerId> live;
    for (int step = 0; step < 3000; ++step) {
      const auto action = rng.uniform_int(0, 3);
      const TimeMs now = step;
      if (action == 0 || live.empty()) {
        p.on_insert(meta(next, static_cast<double>(rng.uniform_int(10, 400)), rng.uniform_int(0, 5000)), now);
        p.mark_idle(next);
        live.push_back(next++);
      } else if (action == 1) {
        const auto id = live[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(live.size()) - 1))];
        if (p.is_idle(id)) {
          p.mark_busy(id);
          p.on_hit(id, now);
          p.mark_idle(id);
        }
      } else if (p.idle_count() > 0) {
        std::vector<std::pair<double, ContainerId>> keyed;
        for (const auto id : live) {
          if (p.is_idle(id)) keyed.emplace_back(p.rank_of(p.meta(id)), id);
        }
        const auto expect = oracle::min_scan(keyed);
        REQUIRE(p.peek_victim() == expect);
        const double before = p.inflation_clock();
        CHECK(p.evict_victim() == expect);
        CHECK(p.inflation_clock() >= before);
        std::erase(live, expect);
      }
    }
  }
}
