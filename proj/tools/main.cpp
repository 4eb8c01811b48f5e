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

#include <iostream>

#include <CLI11.hpp>

#include "kiss_cli/commands.hpp"

using namespace kiss;
using namespace kiss::cli;

int main(int argc, char** argv) {
  CLI::App app{"kiss-sim: warm-pool simulator for size-partitioned serverless edge caches"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kiss-sim 0.1.0");

  GlobalOptions global;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "json";
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed for synthesis")->capture_default_str();
  app.add_option("--config", global.config, "Config file (mode INI/JSON, synthesis JSON or sweep JSON)")
      ->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--event-log", global.event_log, "Write a JSON Lines event log");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Workload analysis reports from a trace");
  a->add_option("--invocations", analyze.invocations, "Per-minute invocation counts CSV");
  a->add_option("--durations", analyze.durations, "Function durations CSV");
  a->add_option("--memory", analyze.memory, "App memory CSV");
  a->add_option("--events", analyze.events, "Canonical event CSV instead of the three raw files");
  a->add_option("--threshold-mb", analyze.threshold_mb, "Size-class threshold")->capture_default_str();
  a->add_option("--bucket-ms", analyze.bucket_ms, "Frequency bucket width")->capture_default_str();
  a->add_option("--zscore", analyze.iat.zscore_threshold, "IAT outlier threshold")->capture_default_str();

  SynthesizeOptions synth;
  auto* s = app.add_subcommand("synthesize", "Generate an edge trace");
  s->add_option("output", synth.output, "Output event CSV (default <out>/trace-<hash>.csv)");
  s->add_option("--preset", synth.preset, "default or stress")
      ->check(CLI::IsMember({"default", "stress"}))
      ->capture_default_str();

  SimulateOptions sim;
  std::string mode;
  double memory_gb = 0;
  auto* r = app.add_subcommand("simulate", "Run one simulation");
  r->add_option("--trace", sim.trace, "Canonical event CSV")->required();
  r->add_option("--mode", mode, "baseline or kiss")->check(CLI::IsMember({"baseline", "kiss"}));
  auto* gb_opt = r->add_option("--memory-gb", memory_gb, "Total pool memory in GB");
  r->add_option("--memory-mb", sim.memory_mb, "Total pool memory in MB")->excludes(gb_opt);
  r->add_option("--split", sim.split, "Small/large split, e.g. 80/20");
  r->add_option("--threshold-mb", sim.threshold_mb, "Size-class threshold");
  r->add_option("--policy-small", sim.policy_small, "lru, gd or freq");
  r->add_option("--policy-large", sim.policy_large, "lru, gd or freq");
  r->add_option("--policy", sim.policy_unified, "Unified pool policy for baseline");
  r->add_flag("--paranoid", sim.paranoid, "Check pool invariants after every event");

  SweepOptions sweep;
  auto* w = app.add_subcommand("sweep", "Memory sweep over baseline and KiSS modes");
  w->add_option("--trace", sweep.trace, "Canonical event CSV (default: synthesized trace)");
  w->add_option("--memory-gb", sweep.memory_points_gb, "Memory points in GB");
  w->add_flag("--all-policies", sweep.all_policies, "All nine KiSS policy pairs plus three baselines");
  w->add_option("--jobs", sweep.jobs, "Worker threads (default: all cores)");

  StressOptions stress;
  auto* t = app.add_subcommand("stress", "High-volume baseline vs KiSS comparison");
  t->add_option("--trace", stress.trace, "Canonical event CSV (default: synthesized stress trace)");
  t->add_option("--memory-gb", stress.memory_gb, "Pool memory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*seed_opt) global.seed = seed;
  if (*out_opt) global.out_dir = out_dir;

  return guarded(std::cerr, [&] {
    global.format = parse_format(format);
    if (*a) return cmd_analyze(global, analyze, std::cout, std::cerr);
    if (*s) return cmd_synthesize(global, synth, std::cout, std::cerr);
    if (*r) {
      if (!mode.empty()) sim.mode = parse_mode(mode);
      if (*gb_opt) sim.memory_mb = memory_gb * kMbPerGb;
      return cmd_simulate(global, sim, std::cout, std::cerr);
    }
    if (*w) return cmd_sweep(global, sweep, std::cout, std::cerr);
    return cmd_stress(global, stress, std::cout, std::cerr);
  });
}
