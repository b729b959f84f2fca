#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphi/graph.hpp"

namespace graphi {

/// One executed operation: timestamps are microseconds on the engine's
/// monotonic clock, zeroed at iteration start. buffer_ids are opaque handles
/// of the operand buffers touched by the op (recorded for locality analysis,
/// not interpreted by the engine).
struct TraceEvent {
  std::int64_t op_id = 0;
  int executor = 0;
  double start_us = 0.0;
  double end_us = 0.0;
  std::vector<std::uint64_t> buffer_ids;
};

/// Record of one graph iteration.
struct Trace {
  std::vector<TraceEvent> events;
  bool pinning_applied = false;
  std::string note;  // e.g. why pinning was degraded

  double makespan_us() const {
    double m = 0.0;
    for (const auto& e : events) m = std::max(m, e.end_us);
    return m;
  }
};

/// Chrome trace-event JSON: an array of complete ("X") events, one per
/// operation, with tid = executor id. Loadable in chrome://tracing and
/// compatible viewers.
inline nlohmann::ordered_json trace_to_chrome_json(const std::vector<TraceEvent>& events,
                                                   const ComputationGraph& graph) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : events) {
    nlohmann::ordered_json obj;
    obj["name"] = graph.op(e.op_id).name;
    obj["ph"] = "X";
    obj["ts"] = e.start_us;
    obj["dur"] = e.end_us - e.start_us;
    obj["pid"] = 1;
    obj["tid"] = e.executor;
    arr.push_back(std::move(obj));
  }
  return arr;
}

}  // namespace graphi
