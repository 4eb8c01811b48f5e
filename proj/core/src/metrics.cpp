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

#include "kiss/metrics.hpp"

#include <ostream>

#include "kiss/errors.hpp"
#include "kiss/trace.hpp"

namespace kiss {

namespace {

double pct(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricBlock finalize(const ClassCounters& c) {
  if (c.total_accesses < 0 || c.hits < 0 || c.misses < 0 || c.drops < 0 || c.oversized_drops < 0 ||
      c.execution_duration_ms < 0) {
    throw ConsistencyError("finalize: negative counter");
  }
  if (c.hits + c.misses + c.drops != c.total_accesses) {
    throw ConsistencyError("finalize: hits + misses + drops != total accesses");
  }
  MetricBlock m;
  m.total_accesses = c.total_accesses;
  m.hits = c.hits;
  m.misses = c.misses;
  m.drops = c.drops;
  m.serviceable_accesses = c.hits + c.misses;
  m.execution_duration_ms = c.execution_duration_ms;
  m.cold_start_pct = pct(c.misses, m.serviceable_accesses);
  m.cold_start_pct_of_total = pct(c.misses, c.total_accesses);
  m.drop_pct = pct(c.drops, c.total_accesses);
  m.hit_rate_pct = pct(c.hits, c.total_accesses);
  return m;
}

SimReport finalize(const RunCounters& counters) {
  SimReport r;
  const auto overall = counters.overall();
  r.overall = finalize(overall);
  r.small = finalize(counters.of(SizeClass::Small));
  r.large = finalize(counters.of(SizeClass::Large));
  r.oversized_drops = overall.oversized_drops;
  r.evictions = counters.evictions();

  ClassCounters pool_sum;
  for (const auto& p : counters.pools) {
    PoolReport pr;
    pr.label = p.config.label;
    pr.capacity_mb = p.config.capacity_mb;
    pr.policy = p.config.policy;
    pr.metrics = finalize(p.counters);
    pr.evictions = p.evictions;
    pr.peak_resident_mb = p.peak_resident_mb;
    r.pools.push_back(std::move(pr));
    pool_sum += p.counters;
  }
  if (!counters.pools.empty() && !(pool_sum == overall)) {
    throw ConsistencyError("finalize: pool counters do not sum to class counters");
  }
  return r;
}

nlohmann::ordered_json to_json(const MetricBlock& m) {
  nlohmann::ordered_json j;
  j["total_accesses"] = m.total_accesses;
  j["hits"] = m.hits;
  j["misses"] = m.misses;
  j["drops"] = m.drops;
  j["serviceable_accesses"] = m.serviceable_accesses;
  j["execution_duration_ms"] = m.execution_duration_ms;
  j["cold_start_pct"] = m.cold_start_pct;
  j["cold_start_pct_of_total"] = m.cold_start_pct_of_total;
  j["drop_pct"] = m.drop_pct;
  j["hit_rate_pct"] = m.hit_rate_pct;
  return j;
}

nlohmann::ordered_json to_json(const SimReport& r) {
  nlohmann::ordered_json j = to_json(r.overall);
  j["per_class"]["small"] = to_json(r.small);
  j["per_class"]["large"] = to_json(r.large);
  j["oversized_drops"] = r.oversized_drops;
  j["evictions"] = r.evictions;
  j["pools"] = nlohmann::ordered_json::array();
  for (const auto& p : r.pools) {
    nlohmann::ordered_json pj;
    pj["label"] = p.label;
    pj["capacity_mb"] = p.capacity_mb;
    pj["policy"] = to_string(p.policy);
    pj["evictions"] = p.evictions;
    pj["peak_resident_mb"] = p.peak_resident_mb;
    pj["metrics"] = to_json(p.metrics);
    j["pools"].push_back(std::move(pj));
  }
  return j;
}

std::optional<double> relative_improvement_pct(double baseline, double variant) {
  if (baseline == 0.0) return std::nullopt;
  return 100.0 * (baseline - variant) / baseline;
}

const ComparisonRow* ComparisonTable::find(std::string_view label, std::string_view scope,
                                           std::string_view metric) const {
  for (const auto& row : rows) {
    if (row.label == label && row.scope == scope && row.metric == metric) return &row;
  }
  return nullptr;
}

ComparisonTable compare(std::span<const LabeledReport> reports, std::string_view baseline_label) {
  if (reports.size() < 2) throw ConfigError("compare needs at least two reports");
  const SimReport* baseline = nullptr;
  for (const auto& [label, report] : reports) {
    if (label == baseline_label) baseline = &report;
  }
  if (baseline == nullptr) throw ConfigError("compare: no report labelled '" + std::string(baseline_label) + "'");

  ComparisonTable table;
  table.baseline_label = std::string(baseline_label);
  constexpr std::array<std::pair<const char*, SizeClass>, 2> classes{
      std::pair{"small", SizeClass::Small}, std::pair{"large", SizeClass::Large}};
  for (const auto& [label, report] : reports) {
    if (label == baseline_label) continue;
    auto add = [&](const char* scope, const MetricBlock& base, const MetricBlock& var) {
      auto row = [&](const char* metric, double b, double v) {
        table.rows.push_back({label, scope, metric, b, v, relative_improvement_pct(b, v)});
      };
      row("cold_start_pct", base.cold_start_pct, var.cold_start_pct);
      row("drop_pct", base.drop_pct, var.drop_pct);
      row("hit_rate_pct", base.hit_rate_pct, var.hit_rate_pct);
      row("execution_duration_ms", static_cast<double>(base.execution_duration_ms),
          static_cast<double>(var.execution_duration_ms));
    };
    add("overall", baseline->overall, report.overall);
    for (const auto& [scope, cls] : classes) add(scope, baseline->of(cls), report.of(cls));
  }
  return table;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
  out << "label,scope,metric,baseline,value,relative_improvement_pct\n";
  for (const auto& r : table.rows) {
    out << r.label << ',' << r.scope << ',' << r.metric << ',' << format_real(r.baseline) << ','
        << format_real(r.value) << ',';
    if (r.relative_improvement_pct) out << format_real(*r.relative_improvement_pct);
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const ComparisonTable& table) {
  nlohmann::ordered_json j;
  j["baseline"] = table.baseline_label;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json row;
    row["label"] = r.label;
    row["scope"] = r.scope;
    row["metric"] = r.metric;
    row["baseline"] = r.baseline;
    row["value"] = r.value;
    row["relative_improvement_pct"] =
        r.relative_improvement_pct ? nlohmann::ordered_json(*r.relative_improvement_pct) : nlohmann::ordered_json();
    j["rows"].push_back(std::move(row));
  }
  return j;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << format_real(row.memory_gb) << ',' << row.mode << ',' << row.split << ',' << row.policy_small << ','
        << row.policy_large << ',' << format_real(r.overall.cold_start_pct) << ','
        << format_real(r.overall.drop_pct) << ',' << format_real(r.overall.hit_rate_pct) << ','
        << format_real(r.small.cold_start_pct) << ',' << format_real(r.large.cold_start_pct) << ','
        << format_real(r.small.drop_pct) << ',' << format_real(r.large.drop_pct) << '\n';
  }
}

}  // namespace kiss
