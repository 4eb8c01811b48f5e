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

#include "kiss/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "csv.hpp"
#include "kiss/analyzer.hpp"
#include "kiss/errors.hpp"
#include "kiss/rng.hpp"

namespace kiss {

namespace {

constexpr TimeMs kMinuteMs = 60'000;

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

void expect_header(csv::LineReader& reader, const std::string& name,
                   std::span<const std::string_view> expected, bool allow_more) {
  std::string line;
  if (!reader.next(line)) throw ParseError(name, 1, "missing header");
  const auto fields = csv::split(line);
  const bool size_ok = allow_more ? fields.size() >= expected.size() : fields.size() == expected.size();
  bool ok = size_ok;
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = csv::trim(fields[i]) == expected[i];
  if (!ok) throw ParseError(name, reader.line_no(), "unexpected header '" + line + "'");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

RawTrace parse_raw_trace(std::istream& invocations, std::istream& durations, std::istream& memory,
                         const std::string& invocations_name, const std::string& durations_name,
                         const std::string& memory_name) {
  RawTrace trace;
  std::string line;

  // memory: app_id,avg_app_memory_mb
  {
    csv::LineReader reader(memory);
    constexpr std::array<std::string_view, 2> header{"app_id", "avg_app_memory_mb"};
    expect_header(reader, memory_name, header, false);
    std::unordered_set<std::string> seen;
    while (reader.next(line)) {
      if (csv::trim(line).empty()) continue;
      const auto f = csv::split(line);
      if (f.size() != 2) throw ParseError(memory_name, reader.line_no(), "expected 2 fields");
      const auto mem = csv::parse_real(f[1]);
      if (!mem) throw ParseError(memory_name, reader.line_no(), "non-numeric avg_app_memory_mb");
      if (!(*mem > 0)) throw ParseError(memory_name, reader.line_no(), "avg_app_memory_mb must be > 0");
      std::string id(csv::trim(f[0]));
      if (id.empty()) throw ParseError(memory_name, reader.line_no(), "empty app_id");
      if (!seen.insert(id).second) throw ParseError(memory_name, reader.line_no(), "duplicate app_id " + id);
      trace.apps.push_back({std::move(id), *mem});
    }
  }

  // durations: function_id,avg_duration_ms
  std::unordered_map<std::string, double> duration_of;
  {
    csv::LineReader reader(durations);
    constexpr std::array<std::string_view, 2> header{"function_id", "avg_duration_ms"};
    expect_header(reader, durations_name, header, false);
    while (reader.next(line)) {
      if (csv::trim(line).empty()) continue;
      const auto f = csv::split(line);
      if (f.size() != 2) throw ParseError(durations_name, reader.line_no(), "expected 2 fields");
      const auto dur = csv::parse_real(f[1]);
      if (!dur) throw ParseError(durations_name, reader.line_no(), "non-numeric avg_duration_ms");
      if (!(*dur > 0)) throw ParseError(durations_name, reader.line_no(), "avg_duration_ms must be > 0");
      std::string id(csv::trim(f[0]));
      if (!duration_of.emplace(id, *dur).second) {
        throw ParseError(durations_name, reader.line_no(), "duplicate function_id " + id);
      }
    }
  }

  // invocations: function_id,app_id,m0,m1,...
  {
    csv::LineReader reader(invocations);
    if (!reader.next(line)) throw ParseError(invocations_name, 1, "missing header");
    const auto header = csv::split(line);
    if (header.size() < 3 || csv::trim(header[0]) != "function_id" || csv::trim(header[1]) != "app_id") {
      throw ParseError(invocations_name, 1, "unexpected header '" + line + "'");
    }
    for (std::size_t i = 2; i < header.size(); ++i) {
      if (csv::trim(header[i]) != "m" + std::to_string(i - 2)) {
        throw ParseError(invocations_name, 1, "expected column m" + std::to_string(i - 2));
      }
    }
    const std::size_t minutes = header.size() - 2;

    std::unordered_set<std::string> app_ids;
    for (const auto& app : trace.apps) app_ids.insert(app.app_id);
    std::unordered_set<std::string> seen;

    while (reader.next(line)) {
      if (csv::trim(line).empty()) continue;
      const auto f = csv::split(line);
      if (f.size() != minutes + 2) {
        throw ParseError(invocations_name, reader.line_no(),
                         "expected " + std::to_string(minutes + 2) + " fields, got " + std::to_string(f.size()));
      }
      RawFunctionRecord rec;
      rec.function_id = std::string(csv::trim(f[0]));
      rec.app_id = std::string(csv::trim(f[1]));
      if (rec.function_id.empty()) throw ParseError(invocations_name, reader.line_no(), "empty function_id");
      if (!seen.insert(rec.function_id).second) {
        throw ParseError(invocations_name, reader.line_no(), "duplicate function_id " + rec.function_id);
      }
      rec.per_minute_counts.reserve(minutes);
      for (std::size_t i = 2; i < f.size(); ++i) {
        const auto count = csv::parse_int(f[i]);
        if (!count || *count < 0) {
          throw ParseError(invocations_name, reader.line_no(),
                           "invalid count in column m" + std::to_string(i - 2));
        }
        rec.per_minute_counts.push_back(*count);
      }
      if (!app_ids.contains(rec.app_id)) {
        throw IntegrityError(invocations_name + ":" + std::to_string(reader.line_no()) + ": function " +
                             rec.function_id + " references unknown app " + rec.app_id);
      }
      const auto dur = duration_of.find(rec.function_id);
      if (dur == duration_of.end()) {
        throw IntegrityError(invocations_name + ":" + std::to_string(reader.line_no()) + ": function " +
                             rec.function_id + " has no row in " + durations_name);
      }
      rec.avg_duration_ms = dur->second;
      rec.zero_invocations = rec.total_invocations() == 0;
      trace.functions.push_back(std::move(rec));
    }
  }
  return trace;
}

RawTrace parse_raw_trace(const std::filesystem::path& invocations_path,
                         const std::filesystem::path& durations_path,
                         const std::filesystem::path& memory_path) {
  auto inv = open_or_throw(invocations_path);
  auto dur = open_or_throw(durations_path);
  auto mem = open_or_throw(memory_path);
  return parse_raw_trace(inv, dur, mem, invocations_path.string(), durations_path.string(),
                         memory_path.string());
}

InitLatencySampler::InitLatencySampler(double p85_ms, double sigma) : p85_ms_(p85_ms), sigma_(sigma) {
  if (!(p85_ms > 0) || !(sigma > 0)) throw ConfigError("init latency p85 and sigma must be > 0");
  // With a = (ln p85 - mu) / sigma and c = ln 2 / sigma the truncated CDF at
  // p85 is Phi(a) / Phi(a + c). It rises monotonically in a, so bisect.
  const double c = std::log(2.0) / sigma;
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) / normal_cdf(mid + c) < 0.85) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  mu_ = std::log(p85_ms) - 0.5 * (lo + hi) * sigma;
}

std::int64_t InitLatencySampler::sample(Rng& rng) const {
  const double cap = cap_ms();
  while (true) {
    const double x = std::exp(mu_ + sigma_ * rng.normal());
    if (x <= cap) return std::llround(x);
  }
}

std::vector<Invocation> expand_counts_to_events(const std::vector<RawFunctionRecord>& functions,
                                                const std::vector<RawAppRecord>& apps,
                                                std::uint64_t seed, const ExpansionOptions& options) {
  const auto profiles = build_profiles(apps, functions, options.threshold_mb);
  const InitLatencySampler small_init(options.small_init_p85_ms, options.init_sigma);
  const InitLatencySampler large_init(options.large_init_p85_ms, options.init_sigma);

  Rng rng(seed);
  std::vector<Invocation> events;
  std::int64_t total = 0;
  for (const auto& fn : functions) total += fn.total_invocations();
  events.reserve(static_cast<std::size_t>(total));

  for (std::size_t i = 0; i < functions.size(); ++i) {
    const auto& fn = functions[i];
    const auto& profile = profiles[i];
    const auto& sampler = profile.size_class == SizeClass::Small ? small_init : large_init;
    const auto warm = std::max<std::int64_t>(1, std::llround(fn.avg_duration_ms));
    for (std::size_t minute = 0; minute < fn.per_minute_counts.size(); ++minute) {
      const TimeMs base = static_cast<TimeMs>(minute) * kMinuteMs;
      for (std::int64_t k = 0; k < fn.per_minute_counts[minute]; ++k) {
        Invocation inv;
        inv.timestamp_ms = rng.uniform_int(base, base + kMinuteMs - 1);
        inv.function_id = fn.function_id;
        inv.memory_mb = profile.est_memory_mb;
        inv.warm_duration_ms = warm;
        inv.cold_init_ms = sampler.sample(rng);
        events.push_back(std::move(inv));
      }
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Invocation& a, const Invocation& b) {
    if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
    return a.function_id < b.function_id;
  });
  return events;
}

void SynthesisConfig::validate() const {
  auto check_range = [](const MemoryRange& r, const char* name) {
    if (!(r.lo > 0) || !(r.hi >= r.lo)) {
      throw ConfigError(std::string(name) + " must be a non-empty positive interval");
    }
  };
  check_range(small_memory_range_mb, "small_memory_range_mb");
  check_range(large_memory_range_mb, "large_memory_range_mb");
  auto check_durations = [](const DurationRange& r, const char* name) {
    if (r.lo < 1 || r.hi < r.lo) throw ConfigError(std::string(name) + " must be a non-empty interval >= 1 ms");
  };
  check_durations(small_warm_ms, "small_warm_ms");
  check_durations(large_warm_ms, "large_warm_ms");
  if (horizon_ms <= 0) throw ConfigError("horizon_ms must be > 0");
  if (small_count < 1 || large_count < 1) throw ConfigError("small_count and large_count must be >= 1");
  if (!(frequency_ratio >= 1.0)) throw ConfigError("frequency_ratio must be >= 1");
  if (!(large_rate_per_min > 0)) throw ConfigError("large_rate_per_min must be > 0");
  if (!(popularity_skew >= 0)) throw ConfigError("popularity_skew must be >= 0");
  if (small_init_p85_ms <= 0 || large_init_p85_ms <= 0) throw ConfigError("init p85 values must be > 0");
  if (!(init_sigma > 0)) throw ConfigError("init_sigma must be > 0");
  for (const auto& b : bursts) {
    if (b.start_ms < 0 || b.end_ms <= b.start_ms || !(b.multiplier > 0)) {
      throw ConfigError("burst windows need 0 <= start < end and multiplier > 0");
    }
  }
}

namespace {

// Piecewise-constant arrival-rate profile over [0, horizon).
class RateProfile {
 public:
  RateProfile(TimeMs horizon, const std::vector<BurstWindow>& bursts) {
    std::vector<TimeMs> cuts{0, horizon};
    for (const auto& b : bursts) {
      cuts.push_back(std::clamp<TimeMs>(b.start_ms, 0, horizon));
      cuts.push_back(std::clamp<TimeMs>(b.end_ms, 0, horizon));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double mult = 1.0;
      for (const auto& b : bursts) {
        if (b.start_ms <= cuts[i] && cuts[i + 1] <= b.end_ms) mult *= b.multiplier;
      }
      acc += mult * static_cast<double>(cuts[i + 1] - cuts[i]);
      segments_.push_back({cuts[i], cuts[i + 1], mult, acc});
    }
  }

  // Rate-weighted length of the horizon, in minutes.
  double weighted_minutes() const { return segments_.back().cumulative / kMinuteMs; }

  // Inverse CDF of the normalized profile.
  TimeMs sample(Rng& rng) const {
    const double target = rng.uniform01() * segments_.back().cumulative;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), target,
                               [](double t, const Segment& s) { return t < s.cumulative; });
    if (it == segments_.end()) --it;
    const double before = it->cumulative - it->multiplier * static_cast<double>(it->end - it->start);
    const auto t = it->start + static_cast<TimeMs>((target - before) / it->multiplier);
    return std::clamp<TimeMs>(t, it->start, it->end - 1);
  }

 private:
  struct Segment {
    TimeMs start;
    TimeMs end;
    double multiplier;
    double cumulative;
  };
  std::vector<Segment> segments_;
};

// Splits `total` across Zipf weights with the largest-remainder method.
std::vector<std::int64_t> apportion(std::int64_t total, int count, double skew) {
  std::vector<double> weights(static_cast<std::size_t>(count));
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    weights[static_cast<std::size_t>(i)] = 1.0 / std::pow(static_cast<double>(i + 1), skew);
    sum += weights[static_cast<std::size_t>(i)];
  }
  std::vector<std::int64_t> shares(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    shares[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += shares[i];
    remainders.emplace_back(exact - static_cast<double>(shares[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++shares[remainders[k % remainders.size()].second];
  return shares;
}

std::string function_name(SizeClass c, int index) {
  std::ostringstream os;
  os << (c == SizeClass::Small ? "small_" : "large_");
  os.width(3);
  os.fill('0');
  os << index;
  return os.str();
}

}  // namespace

std::vector<Invocation> synthesize_edge_trace(const SynthesisConfig& config) {
  config.validate();
  const RateProfile profile(config.horizon_ms, config.bursts);
  const auto large_total = std::llround(config.large_rate_per_min * config.large_count * profile.weighted_minutes());
  const auto small_total = std::llround(config.frequency_ratio * static_cast<double>(large_total));

  Rng rng(config.seed);
  std::vector<Invocation> events;
  events.reserve(static_cast<std::size_t>(large_total + small_total));

  auto emit_class = [&](SizeClass cls, int count, std::int64_t total, const MemoryRange& mem,
                        const DurationRange& warm, std::int64_t p85) {
    const InitLatencySampler init(static_cast<double>(p85), config.init_sigma);
    const auto shares = apportion(total, count, config.popularity_skew);
    for (int i = 0; i < count; ++i) {
      Rng fn_rng(rng.fork_seed());
      const std::string id = function_name(cls, i);
      // Container size is a property of the function; two decimals keep files tidy.
      const double memory = std::clamp(std::round(fn_rng.uniform(mem.lo, mem.hi) * 100.0) / 100.0, mem.lo, mem.hi);
      for (std::int64_t k = 0; k < shares[static_cast<std::size_t>(i)]; ++k) {
        Invocation inv;
        inv.timestamp_ms = profile.sample(fn_rng);
        inv.function_id = id;
        inv.memory_mb = memory;
        inv.warm_duration_ms = fn_rng.uniform_int(warm.lo, warm.hi);
        inv.cold_init_ms = init.sample(fn_rng);
        events.push_back(std::move(inv));
      }
    }
  };
  emit_class(SizeClass::Small, config.small_count, small_total, config.small_memory_range_mb,
             config.small_warm_ms, config.small_init_p85_ms);
  emit_class(SizeClass::Large, config.large_count, large_total, config.large_memory_range_mb,
             config.large_warm_ms, config.large_init_p85_ms);

  std::stable_sort(events.begin(), events.end(), [](const Invocation& a, const Invocation& b) {
    if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
    return a.function_id < b.function_id;
  });
  return events;
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_events(std::ostream& out, std::span<const Invocation> events) {
  out << "timestamp_ms,function_id,memory_mb,warm_duration_ms,cold_init_ms\n";
  for (const auto& e : events) {
    out << e.timestamp_ms << ',' << e.function_id << ',' << format_real(e.memory_mb) << ','
        << e.warm_duration_ms << ',' << e.cold_init_ms << '\n';
  }
}

void write_events(const std::filesystem::path& path, std::span<const Invocation> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  write_events(out, events);
  if (!out) throw ParseError(path.string(), 0, "write failed");
}

std::vector<Invocation> read_events(std::istream& in, const std::string& name) {
  csv::LineReader reader(in);
  constexpr std::array<std::string_view, 5> header{"timestamp_ms", "function_id", "memory_mb",
                                                   "warm_duration_ms", "cold_init_ms"};
  expect_header(reader, name, header, false);
  std::vector<Invocation> events;
  std::string line;
  while (reader.next(line)) {
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 5) throw ParseError(name, reader.line_no(), "expected 5 fields");
    const auto ts = csv::parse_int(f[0]);
    const auto mem = csv::parse_real(f[2]);
    const auto warm = csv::parse_int(f[3]);
    const auto init = csv::parse_int(f[4]);
    if (!ts || *ts < 0) throw ParseError(name, reader.line_no(), "invalid timestamp_ms");
    if (!mem || !(*mem > 0)) throw ParseError(name, reader.line_no(), "invalid memory_mb");
    if (!warm || *warm < 1) throw ParseError(name, reader.line_no(), "invalid warm_duration_ms");
    if (!init || *init < 0) throw ParseError(name, reader.line_no(), "invalid cold_init_ms");
    const auto id = csv::trim(f[1]);
    if (id.empty()) throw ParseError(name, reader.line_no(), "empty function_id");
    events.push_back({*ts, std::string(id), *mem, *warm, *init});
  }
  return events;
}

std::vector<Invocation> read_events(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_events(in, path.string());
}

}  // namespace kiss
