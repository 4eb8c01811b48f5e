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

#include <algorithm>
#include <map>
#include <sstream>

#include "kiss/errors.hpp"
#include "kiss/rng.hpp"
#include "kiss/trace.hpp"
#include "simple_oracles.hpp"

using namespace kiss;

namespace {

RawTrace parse(const std::string& inv, const std::string& dur, const std::string& mem) {
  std::istringstream a(inv), b(dur), c(mem);
  return parse_raw_trace(a, b, c);
}

const char* kMem = "app_id,avg_app_memory_mb\nA,400\n";
const char* kDur = "function_id,avg_duration_ms\nf1,100\nf2,300\n";
const char* kInv = "function_id,app_id,m0,m1,m2\nf1,A,1,0,2\nf2,A,0,0,0\n";

}  // namespace

TEST_CASE("raw trace parses one app and two functions") {
  const auto t = parse(kInv, kDur, kMem);
  REQUIRE(t.apps.size() == 1);
  REQUIRE(t.functions.size() == 2);
  CHECK(t.apps[0].avg_app_memory_mb == 400.0);
  CHECK(t.functions[0].per_minute_counts == std::vector<std::int64_t>{1, 0, 2});
  CHECK(t.functions[0].avg_duration_ms == 100.0);
  CHECK_FALSE(t.functions[0].zero_invocations);
  // Zero-invocation rows stay but are flagged.
  CHECK(t.functions[1].zero_invocations);
}

TEST_CASE("raw trace rejects a function of an unknown app") {
  CHECK_THROWS_AS(parse("function_id,app_id,m0\nf1,X,1\n", "function_id,avg_duration_ms\nf1,10\n", kMem),
                  IntegrityError);
}

TEST_CASE("raw trace reports the line of a bad duration") {
  try {
    parse(kInv, "function_id,avg_duration_ms\nf1,100\nf2,abc\n", kMem);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.file() == "durations");
  }
}

TEST_CASE("raw trace header and row shape checks") {
  CHECK_THROWS_AS(parse("function_id,app_id,m1\nf1,A,1\n", kDur, kMem), ParseError);
  CHECK_THROWS_AS(parse("function_id,app_id,m0\nf1,A,1,2\n", kDur, kMem), ParseError);
  CHECK_THROWS_AS(parse("function_id,app_id,m0\nf1,A,-1\n", kDur, kMem), ParseError);
  CHECK_THROWS_AS(parse(kInv, kDur, "app_id,avg_app_memory_mb\nA,0\n"), ParseError);
  // f2 has no duration row.
  CHECK_THROWS_AS(parse(kInv, "function_id,avg_duration_ms\nf1,100\n", kMem), IntegrityError);
  CHECK_THROWS_AS(parse_raw_trace("/nonexistent/inv.csv", "/nonexistent/d.csv", "/nonexistent/m.csv"), ParseError);
}

TEST_CASE("expansion of zero counts is empty") {
  RawFunctionRecord f{"f", "A", 100, {0, 0, 0}, true};
  CHECK(expand_counts_to_events({f}, {{"A", 400}}, 1).empty());
}

TEST_CASE("expansion places a bucket's events inside its minute") {
  RawFunctionRecord f{"f", "A", 100, {2}, false};
  const auto ev = expand_counts_to_events({f}, {{"A", 400}}, 7);
  REQUIRE(ev.size() == 2);
  for (const auto& e : ev) {
    CHECK(e.timestamp_ms >= 0);
    CHECK(e.timestamp_ms < 60000);
    CHECK(e.memory_mb == 400.0);
    CHECK(e.warm_duration_ms == 100);
  }
}

TEST_CASE("expansion is deterministic, sorted and conserves counts") {
  const auto t = parse("function_id,app_id,m0,m1,m2\nf1,A,3,0,5\nf2,A,4,4,0\n", kDur, kMem);
  const auto a = expand_counts_to_events(t.functions, t.apps, 99);
  const auto b = expand_counts_to_events(t.functions, t.apps, 99);
  CHECK(a == b);
  CHECK(a.size() == 16);
  CHECK(std::is_sorted(a.begin(), a.end(), [](const Invocation& x, const Invocation& y) {
    return std::pair(x.timestamp_ms, x.function_id) < std::pair(y.timestamp_ms, y.function_id);
  }));
  std::map<std::pair<std::string, TimeMs>, int> per_minute;
  for (const auto& e : a) ++per_minute[{e.function_id, e.timestamp_ms / 60000}];
  CHECK(per_minute[{"f1", 0}] == 3);
  CHECK(per_minute[{"f1", 2}] == 5);
  CHECK(per_minute[{"f2", 1}] == 4);
  // Duration shares 100 and 300 over 400 MB.
  for (const auto& e : a) CHECK(e.memory_mb == (e.function_id == "f1" ? 100.0 : 300.0));
}

TEST_CASE("init latency sampler hits its p85 and respects the cap") {
  for (const double p85 : {15000.0, 100000.0}) {
    InitLatencySampler s(p85, kDefaultInitSigma);
    Rng rng(5);
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) {
      const auto v = s.sample(rng);
      CHECK(v >= 0);
      CHECK(static_cast<double>(v) <= s.cap_ms());
      xs.push_back(static_cast<double>(v));
    }
    const double q = oracle::empirical_quantile(xs, 0.85);
    CHECK(q == doctest::Approx(p85).epsilon(0.10));
  }
}

TEST_CASE("synthesized class volumes follow the frequency ratio") {
  SynthesisConfig c;
  c.small_count = 10;
  c.large_count = 2;
  c.frequency_ratio = 5.0;
  c.bursts.clear();
  const auto ev = synthesize_edge_trace(c);
  double small = 0, large = 0;
  for (const auto& e : ev) (e.memory_mb <= 225 ? small : large) += 1;
  REQUIRE(large > 0);
  CHECK(small / large >= 4.75);
  CHECK(small / large <= 5.25);

  c.frequency_ratio = 6.5;
  const auto ev2 = synthesize_edge_trace(c);
  small = large = 0;
  for (const auto& e : ev2) (e.memory_mb <= 225 ? small : large) += 1;
  CHECK(small / large == doctest::Approx(6.5).epsilon(0.05));
}

TEST_CASE("synthesized memory stays inside the class ranges") {
  const auto ev = synthesize_edge_trace(SynthesisConfig{});
  REQUIRE_FALSE(ev.empty());
  for (const auto& e : ev) {
    const bool small = e.memory_mb >= 30 && e.memory_mb <= 60;
    const bool large = e.memory_mb >= 300 && e.memory_mb <= 400;
    CHECK((small || large));
    CHECK(e.timestamp_ms >= 0);
    CHECK(e.timestamp_ms < SynthesisConfig{}.horizon_ms);
    CHECK(e.warm_duration_ms >= (small ? 50 : 1000));
    CHECK(e.warm_duration_ms <= (small ? 500 : 10000));
  }
}

TEST_CASE("synthesized init latencies match the per-class p85") {
  SynthesisConfig c;
  c.small_count = 50;
  c.large_count = 10;
  c.large_rate_per_min = 10;
  c.bursts.clear();
  const auto ev = synthesize_edge_trace(c);
  std::vector<double> small, large;
  for (const auto& e : ev) (e.memory_mb <= 225 ? small : large).push_back(static_cast<double>(e.cold_init_ms));
  REQUIRE(small.size() >= 10000);
  REQUIRE(large.size() >= 10000);
  CHECK(oracle::empirical_quantile(small, 0.85) == doctest::Approx(15000).epsilon(0.10));
  CHECK(oracle::empirical_quantile(large, 0.85) == doctest::Approx(100000).epsilon(0.10));
}

TEST_CASE("a burst window multiplies the arrival rate") {
  SynthesisConfig c;
  c.small_count = 20;
  c.large_count = 4;
  c.large_rate_per_min = 5;
  c.bursts = {{0, 60000, 3.0}};
  const auto ev = synthesize_edge_trace(c);
  std::vector<double> per_minute(static_cast<std::size_t>(c.horizon_ms / 60000), 0.0);
  for (const auto& e : ev) per_minute[static_cast<std::size_t>(e.timestamp_ms / 60000)] += 1;
  double steady = 0;
  for (std::size_t m = 1; m < per_minute.size(); ++m) steady += per_minute[m];
  steady /= static_cast<double>(per_minute.size() - 1);
  CHECK(per_minute[0] / steady == doctest::Approx(3.0).epsilon(0.25));
}

TEST_CASE("synthesis is deterministic and seed sensitive") {
  SynthesisConfig c;
  const auto a = synthesize_edge_trace(c);
  CHECK(a == synthesize_edge_trace(c));
  c.seed = 43;
  CHECK_FALSE(a == synthesize_edge_trace(c));
}

TEST_CASE("synthesis config validation") {
  SynthesisConfig c;
  c.small_memory_range_mb = {60, 30};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.large_count = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.frequency_ratio = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.bursts = {{100, 50, 2.0}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("event files round-trip exactly") {
  const auto ev = synthesize_edge_trace(SynthesisConfig{});
  std::stringstream ss;
  write_events(ss, ev);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "timestamp_ms,function_id,memory_mb,warm_duration_ms,cold_init_ms");
  ss.seekg(0);
  CHECK(read_events(ss) == ev);
}

TEST_CASE("event file errors carry the line") {
  std::istringstream in("timestamp_ms,function_id,memory_mb,warm_duration_ms,cold_init_ms\n0,f,10,5,0\n1,f,x,5,0\n");
  try {
    read_events(in, "ev.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("format_real round-trips") {
  for (const double v : {0.1, 1.0 / 3.0, 45.67, 1e-12, 123456789.125}) {
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(5.0) == "5");
}
