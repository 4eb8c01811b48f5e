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

#include "kiss_cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kiss/analyzer.hpp"
#include "kiss/errors.hpp"
#include "kiss/partitioning.hpp"
#include "kiss/trace.hpp"
#include "kiss_cli/sweep.hpp"

namespace kiss::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json_file(const fs::path& path, const nlohmann::ordered_json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

const char* extension(Format f) { return f == Format::Json ? ".json" : ".csv"; }

void write_percentiles_csv(std::ostream& out, const std::vector<std::pair<std::string, PercentileTable>>& series) {
  out << "series,percentile,value\n";
  for (const auto& [name, table] : series) {
    for (const auto& row : table.rows) out << name << ',' << format_real(row.percentile) << ',' << format_real(row.value) << '\n';
  }
}

nlohmann::ordered_json percentiles_json(const PercentileTable& table) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) rows.push_back({{"percentile", row.percentile}, {"value", row.value}});
  return rows;
}

std::vector<Invocation> load_or_synthesize(const fs::path& trace, const SynthesisConfig& fallback) {
  return trace.empty() ? synthesize_edge_trace(fallback) : read_events(trace);
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  throw ConfigError("--format must be json or csv");
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const IntegrityError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ContractViolation& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kExitData;
  } catch (const ConsistencyError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int cmd_analyze(const GlobalOptions& global, const AnalyzeOptions& options, std::ostream& out, std::ostream&) {
  options.iat.validate();
  std::vector<Invocation> events;
  std::vector<FunctionProfile> profiles;
  if (!options.events.empty()) {
    events = read_events(options.events);
    profiles = profiles_from_events(events, options.threshold_mb);
  } else {
    if (options.invocations.empty() || options.durations.empty() || options.memory.empty()) {
      throw ConfigError("analyze needs --events or all of --invocations, --durations and --memory");
    }
    const auto raw = parse_raw_trace(options.invocations, options.durations, options.memory);
    profiles = build_profiles(raw.apps, raw.functions, options.threshold_mb);
    ExpansionOptions eo;
    eo.threshold_mb = options.threshold_mb;
    events = expand_counts_to_events(raw.functions, raw.apps, global.seed.value_or(42), eo);
  }
  if (profiles.empty()) throw DomainError("analyze: trace has no functions");

  const auto pcts = default_percentiles();
  std::vector<std::pair<std::string, PercentileTable>> memory;
  std::vector<double> all, small, large;
  for (const auto& p : profiles) {
    all.push_back(p.est_memory_mb);
    (p.size_class == SizeClass::Small ? small : large).push_back(p.est_memory_mb);
  }
  memory.emplace_back("all", percentile_distribution(all, pcts));
  if (!small.empty()) memory.emplace_back("small", percentile_distribution(small, pcts));
  if (!large.empty()) memory.emplace_back("large", percentile_distribution(large, pcts));

  const auto freq = frequency_report(events, profiles, options.bucket_ms);
  const auto iat = iat_analysis(events, options.iat, options.threshold_mb, pcts);

  const fs::path dir = global.out_or("out");
  const auto ext = extension(global.format);
  const fs::path memory_path = dir / (std::string("memory_percentiles") + ext);
  const fs::path freq_path = dir / (std::string("frequency") + ext);
  const fs::path iat_path = dir / (std::string("iat") + ext);

  if (global.format == Format::Csv) {
    {
      auto f = open_output(memory_path);
      write_percentiles_csv(f, memory);
    }
    {
      auto f = open_output(freq_path);
      f << "bucket_start_ms,small_count,large_count,ratio\n";
      for (const auto& b : freq) {
        f << b.bucket_start_ms << ',' << b.small_count << ',' << b.large_count << ',' << format_real(b.ratio) << '\n';
      }
    }
    {
      auto f = open_output(iat_path);
      write_percentiles_csv(f, {{"small", iat.small.table}, {"large", iat.large.table}});
    }
  } else {
    nlohmann::ordered_json mj;
    for (const auto& [name, table] : memory) mj[name] = percentiles_json(table);
    write_json_file(memory_path, mj);

    auto fj = nlohmann::ordered_json::array();
    for (const auto& b : freq) {
      fj.push_back({{"bucket_start_ms", b.bucket_start_ms},
                    {"small_count", b.small_count},
                    {"large_count", b.large_count},
                    {"ratio", b.ratio}});
    }
    write_json_file(freq_path, fj);

    nlohmann::ordered_json ij;
    for (const auto c : {SizeClass::Small, SizeClass::Large}) {
      const auto& ci = iat.of(c);
      ij[std::string(to_string(c))] = {{"retained", ci.retained},
                                      {"removed", ci.removed},
                                      {"insufficient", ci.insufficient},
                                      {"percentiles", percentiles_json(ci.table)}};
    }
    write_json_file(iat_path, ij);
  }

  nlohmann::ordered_json summary;
  summary["functions"] = profiles.size();
  summary["events"] = events.size();
  summary["reports"] = {memory_path.string(), freq_path.string(), iat_path.string()};
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_synthesize(const GlobalOptions& global, const SynthesizeOptions& options, std::ostream& out,
                   std::ostream&) {
  SynthesisConfig config;
  if (!global.config.empty()) {
    config = load_synthesis_config(global.config);
  } else if (options.preset == "stress") {
    config = stress_synthesis_config();
  } else if (options.preset != "default") {
    throw ConfigError("unknown preset '" + options.preset + "'");
  }
  if (global.seed) config.seed = *global.seed;
  config.validate();

  const auto hash = config_hash(to_json(config).dump());
  const fs::path path = options.output.empty() ? global.out_or("out") / ("trace-" + hash + ".csv") : options.output;
  const auto events = synthesize_edge_trace(config);
  {
    auto f = open_output(path);
    write_events(f, events);
  }

  std::int64_t small = 0;
  for (const auto& e : events) small += e.memory_mb <= kDefaultThresholdMb ? 1 : 0;
  const std::int64_t large = static_cast<std::int64_t>(events.size()) - small;
  nlohmann::ordered_json summary;
  summary["output"] = path.string();
  summary["config_hash"] = hash;
  summary["events"] = events.size();
  summary["small_events"] = small;
  summary["large_events"] = large;
  summary["achieved_ratio"] = large > 0 ? static_cast<double>(small) / static_cast<double>(large) : 0.0;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& global, const SimulateOptions& options, std::ostream& out, std::ostream&) {
  if (options.trace.empty()) throw ConfigError("simulate needs --trace");
  ModeConfig config = global.config.empty() ? ModeConfig{} : load_mode_config(global.config);
  if (options.mode) config.mode = *options.mode;
  if (options.memory_mb) config.total_memory_mb = *options.memory_mb;
  if (options.split) config.split = PoolSplit::parse(*options.split);
  if (options.threshold_mb) config.threshold_mb = *options.threshold_mb;
  if (options.policy_small) config.small_policy = parse_policy(*options.policy_small);
  if (options.policy_large) config.large_policy = parse_policy(*options.policy_large);
  if (options.policy_unified) config.unified_policy = parse_policy(*options.policy_unified);
  if (global.seed) config.seed = *global.seed;
  config.validate();

  const auto events = read_events(options.trace);
  const auto config_json = to_json(config);
  const auto hash = config_hash(config_json.dump() + "|" + options.trace.string());

  std::ofstream log;
  RunOptions ro;
  ro.paranoid = options.paranoid;
  fs::path log_path;
  if (global.event_log) {
    log_path = global.out_or("out") / ("events-" + hash + ".jsonl");
    log = open_output(log_path);
    ro.event_log = &log;
  }
  const auto report = config.mode == Mode::Kiss ? route_and_run(events, config.kiss(), ro)
                                                : run_baseline(events, config.baseline(), ro);

  std::ostringstream body;
  if (global.format == Format::Csv) {
    SweepMode m{config.mode, config.split,
                config.mode == Mode::Kiss ? config.small_policy : config.unified_policy, config.large_policy};
    const SweepRow rows[] = {make_row({config.total_memory_mb / kMbPerGb, m}, report)};
    write_sweep_csv(body, rows);
  } else {
    nlohmann::ordered_json j;
    j["config"] = config_json;
    j["trace"] = {{"path", options.trace.string()}, {"events", events.size()}};
    j["report"] = to_json(report);
    if (!log_path.empty()) j["event_log"] = log_path.string();
    body << j.dump(2) << '\n';
  }
  out << body.str();
  if (global.out_dir) {
    auto f = open_output(*global.out_dir / ("simulate-" + hash + extension(global.format)));
    f << body.str();
  }
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& global, const SweepOptions& options, std::ostream& out, std::ostream& err) {
  SweepSpec spec = global.config.empty() ? SweepSpec{} : load_sweep_spec(global.config);
  if (!options.trace.empty()) spec.trace_path = options.trace;
  if (global.seed) spec.seed = *global.seed;
  if (global.out_dir) spec.output_dir = *global.out_dir;
  if (!options.memory_points_gb.empty()) spec.memory_points_gb = options.memory_points_gb;
  if (options.all_policies) spec.modes = all_policy_modes();
  if (options.jobs) spec.jobs = *options.jobs;
  spec.validate();

  SynthesisConfig synth;
  synth.seed = spec.seed;
  const auto events = load_or_synthesize(spec.trace_path, synth);
  const auto cells = sweep_cells(spec);
  const auto results = run_cells(events, cells, spec.threshold_mb, spec.jobs);

  std::string identity = spec.trace_path.empty() ? "synth:" + std::to_string(spec.seed) : spec.trace_path.string();
  identity += "|" + format_real(spec.threshold_mb);
  std::vector<SweepRow> rows;
  std::size_t failed = 0;
  for (const auto& r : results) {
    const auto cfg = to_json(r.cell.mode.at(r.cell.memory_gb, spec.threshold_mb)).dump();
    if (!r.row) {
      ++failed;
      err << "cell " << cfg << " failed: " << r.error << '\n';
      continue;
    }
    rows.push_back(*r.row);
    write_json_file(spec.output_dir / "cells" / (config_hash(cfg + "|" + identity) + ".json"),
                    nlohmann::ordered_json{{"config", nlohmann::ordered_json::parse(cfg)},
                                           {"report", to_json(r.row->report)}});
  }

  std::string sweep_id = identity;
  for (const auto& c : cells) sweep_id += "|" + to_json(c.mode.at(c.memory_gb, spec.threshold_mb)).dump();
  const auto hash = config_hash(sweep_id);
  const fs::path csv_path = spec.output_dir / ("sweep-" + hash + ".csv");
  {
    auto f = open_output(csv_path);
    write_sweep_csv(f, rows);
  }

  nlohmann::ordered_json summary;
  summary["sweep_csv"] = csv_path.string();
  summary["cells"] = cells.size();
  summary["failed"] = failed;
  summary["events"] = events.size();
  out << summary.dump(2) << '\n';
  return failed == 0 ? kExitOk : kExitInternal;
}

int cmd_stress(const GlobalOptions& global, const StressOptions& options, std::ostream& out, std::ostream& err) {
  if (!(options.memory_gb > 0)) throw ConfigError("--memory-gb must be > 0");
  ModeConfig config = global.config.empty() ? ModeConfig{} : load_mode_config(global.config);
  config.total_memory_mb = options.memory_gb * kMbPerGb;

  auto synth = stress_synthesis_config();
  if (global.seed) synth.seed = *global.seed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto events = load_or_synthesize(options.trace, synth);
  const auto t1 = std::chrono::steady_clock::now();
  const auto baseline = run_baseline(events, config.baseline());
  const auto kiss = route_and_run(events, config.kiss());
  const auto t2 = std::chrono::steady_clock::now();

  auto side = [](const SimReport& r) {
    nlohmann::ordered_json j;
    j["serviced"] = r.overall.serviceable_accesses;
    j["hit_rate_pct"] = r.overall.hit_rate_pct;
    j["report"] = to_json(r);
    return j;
  };
  const std::vector<LabeledReport> labelled{{"baseline", baseline}, {"kiss", kiss}};
  nlohmann::ordered_json j;
  j["events"] = events.size();
  j["memory_gb"] = options.memory_gb;
  j["baseline"] = side(baseline);
  j["kiss"] = side(kiss);
  j["comparison"] = to_json(compare(labelled));
  out << j.dump(2) << '\n';

  // Wall-clock figures stay off stdout so reports remain reproducible.
  const double load_s = std::chrono::duration<double>(t1 - t0).count();
  const double sim_s = std::chrono::duration<double>(t2 - t1).count();
  err << "trace " << events.size() << " events in " << load_s << " s; both runs in " << sim_s << " s ("
      << (sim_s > 0 ? 2.0 * static_cast<double>(events.size()) / sim_s : 0.0) << " events/s)\n";
  return kExitOk;
}

}  // namespace kiss::cli
