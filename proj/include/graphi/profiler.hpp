#pragma once

// Profiler: measures a graph under every symmetric executor configuration,
// picks the fastest, and estimates per-op durations from its traces. The
// measurement runs use the fifo policy because level values need durations
// that do not exist yet; the returned Profile carries the levels that enable
// critical-path-first scheduling afterwards.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphi/engine.hpp"
#include "graphi/error.hpp"
#include "graphi/graph.hpp"
#include "graphi/graph_json.hpp"
#include "graphi/trace.hpp"

namespace graphi {

struct IterationCounts {
  int warmup = 2;
  int measure = 5;
};

struct Profile {
  ExecutionConfig chosen;
  DurationTable durations;
  LevelTable levels;
  // per-config median makespan, in enumeration order
  std::vector<std::pair<ExecutionConfig, double>> makespans;
  IterationCounts iterations;
};

/// "kxT" label used for makespan tables and logs.
inline std::string config_label(const ExecutionConfig& cfg) {
  return std::to_string(cfg.num_executors) + "x" +
         std::to_string(cfg.threads_per_executor);
}

/// All symmetric splits of usable_cores: k executors with usable_cores/k
/// threads for every power-of-two divisor k, plus the all-executors split
/// (k = usable_cores, 1 thread each). Under compact-tiles pinning, splits
/// whose team size would straddle a tile are dropped. Ascending k.
inline std::vector<ExecutionConfig> enumerate_configs(
    int usable_cores, int tile_size = 2, PinMode pinning = PinMode::None) {
  if (usable_cores < 1) {
    raise(ErrorCode::InvalidArgument, "usable_cores must be >= 1");
  }
  if (tile_size < 1) {
    raise(ErrorCode::InvalidArgument, "tile_size must be >= 1");
  }
  std::vector<int> ks;
  for (int k = 1; k <= usable_cores; k *= 2) {
    if (usable_cores % k == 0) ks.push_back(k);
    if (k > usable_cores / 2) break;
  }
  if (ks.empty() || ks.back() != usable_cores) ks.push_back(usable_cores);
  std::vector<ExecutionConfig> out;
  for (int k : ks) {
    ExecutionConfig cfg;
    cfg.num_executors = k;
    cfg.threads_per_executor = usable_cores / k;
    cfg.pinning = pinning;
    cfg.tile_size = tile_size;
    if (pinning == PinMode::CompactTiles && cfg.threads_per_executor > 1 &&
        cfg.threads_per_executor % tile_size != 0) {
      continue;
    }
    out.push_back(cfg);
  }
  return out;
}

/// Per-op mean duration across traces of the same graph. Zero means are
/// clamped to the table's epsilon so durations stay positive.
inline DurationTable estimate_durations(const std::vector<Trace>& traces) {
  if (traces.empty()) {
    raise(ErrorCode::InvalidArgument, "need at least one trace");
  }
  std::map<std::int64_t, double> sums;
  std::map<std::int64_t, int> counts;
  for (const auto& ev : traces[0].events) {
    sums[ev.op_id] = 0.0;
    counts[ev.op_id] = 0;
  }
  for (const auto& trace : traces) {
    std::size_t seen = 0;
    for (const auto& ev : trace.events) {
      auto it = sums.find(ev.op_id);
      if (it == sums.end()) {
        raise(ErrorCode::InconsistentTraces,
              "op " + std::to_string(ev.op_id) +
                  " is not present in every trace",
              {ev.op_id});
      }
      it->second += ev.end_us - ev.start_us;
      ++counts[ev.op_id];
      ++seen;
    }
    if (seen != sums.size()) {
      raise(ErrorCode::InconsistentTraces,
            "traces cover different op sets");
    }
  }
  DurationTable out;
  for (const auto& [id, sum] : sums) {
    out.set(id, sum / counts[id]);
  }
  return out;
}

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Runs every config for warmup + measure iterations under fifo, records the
/// median measured makespan, then reruns the argmin config to estimate per-op
/// durations and levels. Ties go to the earliest config in the list.
inline Profile profile_graph(const ComputationGraph& graph,
                             const std::vector<ExecutionConfig>& configs,
                             int warmup = 2, int measure = 5) {
  if (measure < 1) {
    raise(ErrorCode::InvalidArgument, "measure must be >= 1");
  }
  if (warmup < 0) {
    raise(ErrorCode::InvalidArgument, "warmup must be >= 0");
  }
  if (configs.empty()) {
    raise(ErrorCode::InvalidArgument, "need at least one config");
  }
  Profile profile;
  profile.iterations = {warmup, measure};
  auto measure_config = [&](const ExecutionConfig& cfg,
                            std::vector<Trace>* keep) -> double {
    ExecutionConfig run_cfg = cfg;
    run_cfg.policy = SchedulePolicy::Fifo;
    try {
      auto engine = start_engine(graph, run_cfg);
      for (int i = 0; i < warmup; ++i) engine->run_iteration();
      std::vector<double> makespans;
      for (int i = 0; i < measure; ++i) {
        Trace t = engine->run_iteration();
        makespans.push_back(t.makespan_us());
        if (keep != nullptr) keep->push_back(std::move(t));
      }
      engine->shutdown();
      return detail::median(std::move(makespans));
    } catch (const Error& e) {
      raise(e.code(), "config " + config_label(cfg) + ": " + e.what(),
            e.ids());
    }
  };

  for (const auto& cfg : configs) {
    profile.makespans.push_back({cfg, measure_config(cfg, nullptr)});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < profile.makespans.size(); ++i) {
    if (profile.makespans[i].second < profile.makespans[best].second) {
      best = i;
    }
  }
  profile.chosen = profile.makespans[best].first;
  std::vector<Trace> traces;
  measure_config(profile.chosen, &traces);
  profile.durations = estimate_durations(traces);
  profile.levels = compute_levels(graph, profile.durations);
  return profile;
}

// ---- JSON round trip ----

inline json config_to_json(const ExecutionConfig& cfg) {
  json j;
  j["executors"] = cfg.num_executors;
  j["threads_per_executor"] = cfg.threads_per_executor;
  j["pinning"] = to_string(cfg.pinning);
  j["tile_size"] = cfg.tile_size;
  j["reserved_cores"] = cfg.reserved_cores;
  j["policy"] = to_string(cfg.policy);
  return j;
}

inline ExecutionConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    raise(ErrorCode::SchemaError, "config: expected an object");
  }
  ExecutionConfig cfg;
  cfg.num_executors =
      static_cast<int>(detail::require_int(j, "config", "executors"));
  cfg.threads_per_executor = static_cast<int>(
      detail::require_int(j, "config", "threads_per_executor"));
  cfg.pinning = parse_pin_mode(detail::require_string(j, "config", "pinning"));
  cfg.tile_size = static_cast<int>(detail::require_int(j, "config", "tile_size"));
  cfg.reserved_cores =
      static_cast<int>(detail::require_int(j, "config", "reserved_cores"));
  cfg.policy = parse_policy(detail::require_string(j, "config", "policy"));
  return cfg;
}

inline json profile_to_json(const Profile& profile) {
  json j;
  j["chosen"] = config_to_json(profile.chosen);
  auto sorted_ids = [](const std::unordered_map<std::int64_t, double>& m) {
    std::vector<std::int64_t> ids;
    ids.reserve(m.size());
    for (const auto& [id, us] : m) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  json durations = json::object();
  for (std::int64_t id : sorted_ids(profile.durations.entries())) {
    durations[std::to_string(id)] = profile.durations.at(id);
  }
  j["durations_us"] = std::move(durations);
  json levels = json::object();
  for (std::int64_t id : sorted_ids(profile.levels.entries())) {
    levels[std::to_string(id)] = profile.levels.at(id);
  }
  j["levels_us"] = std::move(levels);
  json makespans = json::object();
  for (const auto& [cfg, us] : profile.makespans) {
    makespans[config_label(cfg)] = us;
  }
  j["makespans_us"] = std::move(makespans);
  return j;
}

inline Profile profile_from_json(const json& j) {
  if (!j.is_object()) {
    raise(ErrorCode::SchemaError, "profile: expected an object");
  }
  for (const char* key : {"chosen", "durations_us", "levels_us", "makespans_us"}) {
    if (!j.contains(key)) {
      raise(ErrorCode::SchemaError,
            "profile: missing key '" + std::string(key) + "'");
    }
  }
  Profile profile;
  profile.chosen = config_from_json(j.at("chosen"));
  auto parse_id = [](const std::string& key) -> std::int64_t {
    try {
      std::size_t pos = 0;
      std::int64_t id = std::stoll(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
      return id;
    } catch (const std::exception&) {
      raise(ErrorCode::SchemaError, "profile: bad op id key '" + key + "'");
    }
  };
  for (const auto& [key, value] : j.at("durations_us").items()) {
    if (!value.is_number()) {
      raise(ErrorCode::SchemaError, "profile: durations_us '" + key +
                                        "' must be a number");
    }
    profile.durations.set(parse_id(key), value.get<double>());
  }
  for (const auto& [key, value] : j.at("levels_us").items()) {
    if (!value.is_number()) {
      raise(ErrorCode::SchemaError,
            "profile: levels_us '" + key + "' must be a number");
    }
    profile.levels.set(parse_id(key), value.get<double>());
  }
  for (const auto& [key, value] : j.at("makespans_us").items()) {
    auto sep = key.find('x');
    if (sep == std::string::npos || !value.is_number()) {
      raise(ErrorCode::SchemaError,
            "profile: bad makespans_us entry '" + key + "'");
    }
    ExecutionConfig cfg = profile.chosen;
    try {
      cfg.num_executors = std::stoi(key.substr(0, sep));
      cfg.threads_per_executor = std::stoi(key.substr(sep + 1));
    } catch (const std::exception&) {
      raise(ErrorCode::SchemaError,
            "profile: bad makespans_us key '" + key + "'");
    }
    profile.makespans.push_back({cfg, value.get<double>()});
  }
  return profile;
}

}  // namespace graphi
