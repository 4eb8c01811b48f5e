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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "hand_traces.hpp"
#include "kiss/analyzer.hpp"
#include "kiss/config.hpp"
#include "kiss/partitioning.hpp"
#include "kiss/trace.hpp"
#include "kiss_cli/sweep.hpp"
#include "random_traces.hpp"
#include "simple_oracles.hpp"

using namespace kiss;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool conserved(const MetricBlock& m) {
  return m.hits + m.misses + m.drops == m.total_accesses && m.serviceable_accesses == m.hits + m.misses;
}

bool conserved(const SimReport& r) {
  bool ok = conserved(r.overall) && conserved(r.small) && conserved(r.large);
  for (const auto& p : r.pools) ok = ok && conserved(p.metrics);
  return ok && r.small.total_accesses + r.large.total_accesses == r.overall.total_accesses;
}

const std::vector<Invocation>& default_trace() {
  static const auto events = synthesize_edge_trace(load_synthesis_config(KISS_FIXTURE_DIR "/default_trace.json"));
  return events;
}

SimReport kiss_at(double gb, PolicyKind s = PolicyKind::Lru, PolicyKind l = PolicyKind::Lru) {
  KissConfig k;
  k.total_memory_mb = gb * kMbPerGb;
  k.small_policy = s;
  k.large_policy = l;
  return route_and_run(default_trace(), k);
}

SimReport base_at(double gb, PolicyKind p = PolicyKind::Lru) {
  return run_baseline(default_trace(), {gb * kMbPerGb, p});
}

Verdict conservation() {
  Rng rng(1);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto ev = oracle::random_trace(rng);
    const double mb = rng.uniform(1.0, 3000.0);
    for (const auto ps : {PolicyKind::Lru, PolicyKind::GreedyDual, PolicyKind::Frequency}) {
      if (!conserved(run_baseline(ev, {mb, ps}))) ++bad;
      for (const auto pl : {PolicyKind::Lru, PolicyKind::GreedyDual, PolicyKind::Frequency}) {
        KissConfig k;
        k.total_memory_mb = mb;
        k.small_policy = ps;
        k.large_policy = pl;
        if (!conserved(route_and_run(ev, k))) ++bad;
      }
    }
  }
  return {bad == 0, "1000 traces x 12 configurations, " + std::to_string(bad) + " violations"};
}

Verdict hand_traces() {
  int ok = 0;
  std::string failed;
  const auto all = oracle::hand_traces();
  for (const auto& t : all) {
    if (oracle::matches(t, oracle::run_hand_trace(t))) {
      ++ok;
    } else {
      failed += " [" + t.name + "]";
    }
  }
  return {ok == static_cast<int>(all.size()) && all.size() >= 10,
          std::to_string(ok) + "/" + std::to_string(all.size()) + " hand traces match" + failed};
}

Verdict lru_stack() {
  Rng rng(3);
  int violations = 0, mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const auto ev = oracle::random_trace(rng);
    double biggest = 1;
    std::vector<std::pair<std::string, std::int64_t>> keyed;
    for (const auto& e : ev) {
      biggest = std::max(biggest, e.memory_mb);
      keyed.emplace_back(e.function_id, std::llround(e.memory_mb * 1000.0));
    }
    std::int64_t prev = -1;
    for (double cap = biggest; cap <= biggest * 10; cap *= 1.3) {
      const auto hits = run_pure_caching(ev, cap, PolicyKind::Lru).overall().hits;
      if (hits < prev) ++violations;
      if (hits != oracle::classical_lru_hits(keyed, std::llround(cap * 1000.0))) ++mismatches;
      prev = hits;
    }
  }
  return {violations == 0 && mismatches == 0,
          std::to_string(violations) + " monotonicity violations, " + std::to_string(mismatches) +
              " disagreements with a list LRU"};
}

Verdict memory_split() {
  Rng rng(4);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double app_mem = rng.uniform(1.0, 4000.0);
    std::vector<RawFunctionRecord> fns;
    const auto n = rng.uniform_int(1, 12);
    for (std::int64_t f = 0; f < n; ++f) {
      fns.push_back({"f" + std::to_string(f), "A", rng.uniform(0.001, 1e5), {1}, false});
    }
    double sum = 0;
    for (const auto& p : build_profiles({{"A", app_mem}}, fns, kDefaultThresholdMb)) sum += p.est_memory_mb;
    worst = std::max(worst, std::abs(sum - app_mem) / app_mem);
  }
  const auto single = build_profiles({{"A", 321.5}}, {{"f", "A", 77, {1}, false}}, kDefaultThresholdMb);
  const bool identity = single.size() == 1 && single[0].est_memory_mb == 321.5;
  return {worst <= 1e-9 && identity,
          "worst relative error " + std::to_string(worst) + (identity ? ", identity exact" : ", identity off")};
}

Verdict cold_start() {
  const auto t0 = Clock::now();
  const auto b8 = base_at(8), k8 = kiss_at(8);
  const auto rel = relative_improvement_pct(b8.overall.cold_start_pct, k8.overall.cold_start_pct);
  double worst_gap = -1e9;
  for (double gb = 4; gb <= 10; gb += 1) {
    worst_gap = std::max(worst_gap, kiss_at(gb).overall.cold_start_pct - base_at(gb).overall.cold_start_pct);
  }
  const double secs = seconds_since(t0);
  const bool pass = rel && *rel >= 30.0 && worst_gap <= 2.0 && secs < 120;
  return {pass, "8 GB cold start " + fmt(b8.overall.cold_start_pct) + "% -> " + fmt(k8.overall.cold_start_pct) +
                    "% (" + (rel ? fmt(*rel, 1) : std::string("n/a")) + "% relative), worst 4-10 GB gap " +
                    fmt(worst_gap) + " pp, " + fmt(secs, 1) + " s"};
}

Verdict drops() {
  const auto b8 = base_at(8), k8 = kiss_at(8);
  const auto rel = relative_improvement_pct(b8.overall.drop_pct, k8.overall.drop_pct);
  double worst_gap = -1e9;
  for (const double gb : {2.0, 3.0}) {
    worst_gap = std::max(worst_gap, kiss_at(gb).overall.drop_pct - base_at(gb).overall.drop_pct);
  }
  const bool pass = rel && *rel >= 25.0 && worst_gap <= 5.0;
  return {pass, "8 GB drops " + fmt(b8.overall.drop_pct) + "% -> " + fmt(k8.overall.drop_pct) + "% (" +
                    (rel ? fmt(*rel, 1) + "% relative" : std::string("relative change undefined")) +
                    "), worst 2-3 GB gap " + fmt(worst_gap) + " pp"};
}

Verdict fairness() {
  const auto b8 = base_at(8), k8 = kiss_at(8);
  const bool pass = k8.small.cold_start_pct < b8.small.cold_start_pct && k8.large.cold_start_pct < b8.large.cold_start_pct;
  return {pass, "small " + fmt(b8.small.cold_start_pct) + "% -> " + fmt(k8.small.cold_start_pct) + "%, large " +
                    fmt(b8.large.cold_start_pct) + "% -> " + fmt(k8.large.cold_start_pct) + "%"};
}

Verdict policy_independence() {
  cli::SweepSpec spec;
  spec.modes = cli::all_policy_modes();
  const auto cells = cli::sweep_cells(spec);
  const auto results = cli::run_cells(default_trace(), cells, spec.threshold_mb, 0);
  std::size_t failed = 0;
  std::map<std::string, double> base8, kiss8;
  for (const auto& r : results) {
    if (!r.row) {
      ++failed;
      continue;
    }
    if (r.row->memory_gb != 8) continue;
    if (r.row->mode == "baseline") base8[r.row->policy_small] = r.row->report.overall.cold_start_pct;
    if (r.row->mode == "kiss" && r.row->policy_small == r.row->policy_large) {
      kiss8[r.row->policy_small] = r.row->report.overall.cold_start_pct;
    }
  }
  bool ordered = base8.size() == 3 && kiss8.size() == 3;
  std::string detail;
  for (const auto& [p, b] : base8) {
    ordered = ordered && kiss8.count(p) && kiss8[p] < b;
    detail += " " + p + " " + fmt(b) + "->" + fmt(kiss8[p]);
  }
  return {failed == 0 && ordered, std::to_string(cells.size()) + " cells, " + std::to_string(failed) +
                                      " failed; 8 GB matched pairs:" + detail};
}

Verdict saturation() {
  double worst_cs = 0, worst_drop = 0;
  for (double gb = 16; gb <= 24; gb += 1) {
    for (const auto& r : {base_at(gb), kiss_at(gb)}) {
      worst_cs = std::max(worst_cs, r.overall.cold_start_pct);
      worst_drop = std::max(worst_drop, r.overall.drop_pct);
    }
  }
  return {worst_cs <= 2.0 && worst_drop == 0.0,
          "16-24 GB worst cold start " + fmt(worst_cs) + "%, worst drop " + fmt(worst_drop) + "%"};
}

Verdict determinism() {
  auto once = [] {
    std::ostringstream log;
    RunOptions ro;
    ro.event_log = &log;
    KissConfig k;
    k.total_memory_mb = 8 * kMbPerGb;
    std::string out = to_json(route_and_run(synthesize_edge_trace(SynthesisConfig{}), k, ro)).dump();
    out += to_json(run_baseline(synthesize_edge_trace(SynthesisConfig{}), {8 * kMbPerGb, PolicyKind::GreedyDual})).dump();
    return out + log.str();
  };
  const auto a = once(), b = once();
  return {a == b, "two seeded runs, " + std::to_string(a.size()) + " bytes each, " + (a == b ? "identical" : "differ")};
}

Verdict stress() {
  const auto t0 = Clock::now();
  const auto ev = synthesize_edge_trace(stress_synthesis_config());
  KissConfig k;
  k.total_memory_mb = 10 * kMbPerGb;
  const auto kiss = route_and_run(ev, k);
  const auto base = run_baseline(ev, {10 * kMbPerGb, PolicyKind::Lru});
  const double secs = seconds_since(t0);
  const bool pass = ev.size() >= 4'000'000 && secs <= 300 && conserved(kiss) && conserved(base) &&
                    kiss.overall.hit_rate_pct > base.overall.hit_rate_pct;
  return {pass, std::to_string(ev.size()) + " events in " + fmt(secs, 1) + " s, hit rate " +
                    fmt(base.overall.hit_rate_pct) + "% -> " + fmt(kiss.overall.hit_rate_pct) + "%"};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, conservation}, {2, hand_traces},         {3, lru_stack},  {4, memory_split},
      {5, cold_start},   {6, drops},               {7, fairness},   {8, policy_independence},
      {9, saturation},   {10, determinism},        {11, stress}};
  int failures = 0;
  for (const auto& [n, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
