#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "graphi/error.hpp"

namespace graphi {

// ---------------------------------------------------------------------------
// Operation specs
// ---------------------------------------------------------------------------

enum class EwKind { Add, Mul, Sigmoid, Tanh, Relu };

inline bool is_binary(EwKind op) { return op == EwKind::Add || op == EwKind::Mul; }

inline const char* to_string(EwKind op) {
  switch (op) {
    case EwKind::Add: return "add";
    case EwKind::Mul: return "mul";
    case EwKind::Sigmoid: return "sigmoid";
    case EwKind::Tanh: return "tanh";
    case EwKind::Relu: return "relu";
  }
  return "?";
}

inline std::optional<EwKind> parse_ew_kind(const std::string& s) {
  if (s == "add") return EwKind::Add;
  if (s == "mul") return EwKind::Mul;
  if (s == "sigmoid") return EwKind::Sigmoid;
  if (s == "tanh") return EwKind::Tanh;
  if (s == "relu") return EwKind::Relu;
  return std::nullopt;
}

struct MatMulOp {
  std::int64_t m = 0, k = 0, n = 0;
  bool operator==(const MatMulOp&) const = default;
};

struct ElementwiseOp {
  EwKind op = EwKind::Add;
  std::int64_t len = 0;
  bool operator==(const ElementwiseOp&) const = default;
};

struct SyntheticOp {
  double us = 0.0;  // target busy duration in microseconds
  bool operator==(const SyntheticOp&) const = default;
};

using OpKindSpec = std::variant<MatMulOp, ElementwiseOp, SyntheticOp>;

/// One node of a computation graph.
struct OperationSpec {
  std::int64_t id = 0;
  std::string name;
  OpKindSpec kind = SyntheticOp{};
  bool small = false;  // eligible for inline / bootstrap handling in the engine

  bool operator==(const OperationSpec&) const = default;
};

inline void validate_spec(const OperationSpec& op) {
  if (op.id < 0)
    raise(ErrorCode::InvalidArgument, "op id must be non-negative", {op.id});
  if (const auto* mm = std::get_if<MatMulOp>(&op.kind)) {
    if (mm->m <= 0 || mm->k <= 0 || mm->n <= 0)
      raise(ErrorCode::InvalidArgument,
            "matmul dims must be strictly positive (op " + std::to_string(op.id) + ")",
            {op.id});
  } else if (const auto* ew = std::get_if<ElementwiseOp>(&op.kind)) {
    if (ew->len <= 0)
      raise(ErrorCode::InvalidArgument,
            "elementwise length must be strictly positive (op " + std::to_string(op.id) + ")",
            {op.id});
  } else if (const auto* sy = std::get_if<SyntheticOp>(&op.kind)) {
    if (sy->us < 0.0)
      raise(ErrorCode::InvalidArgument,
            "synthetic duration must be >= 0 (op " + std::to_string(op.id) + ")", {op.id});
  }
}

// ---------------------------------------------------------------------------
// Duration / level tables
// ---------------------------------------------------------------------------

/// Per-operation duration estimates in microseconds. Entries are strictly
/// positive: values below `epsilon` (notably the zero duration of an empty
/// synthetic op) are stored as `epsilon` so level comparisons stay strict.
class DurationTable {
 public:
  static constexpr double kDefaultEpsilonUs = 0.01;

  explicit DurationTable(double epsilon = kDefaultEpsilonUs) : epsilon_(epsilon) {}

  void set(std::int64_t id, double us) {
    if (us < 0.0)
      raise(ErrorCode::InvalidArgument, "duration must be >= 0 for op " + std::to_string(id),
            {id});
    us_[id] = std::max(us, epsilon_);
  }

  bool contains(std::int64_t id) const { return us_.count(id) != 0; }

  double at(std::int64_t id) const {
    auto it = us_.find(id);
    if (it == us_.end())
      raise(ErrorCode::MissingDuration, "no duration for op " + std::to_string(id), {id});
    return it->second;
  }

  std::size_t size() const { return us_.size(); }
  double epsilon() const { return epsilon_; }
  const std::unordered_map<std::int64_t, double>& entries() const { return us_; }

 private:
  double epsilon_;
  std::unordered_map<std::int64_t, double> us_;
};

/// Per-operation level values in microseconds: the operation's own duration
/// plus the longest-duration downstream path to a sink. Inclusive convention:
/// a sink's level equals its own duration.
class LevelTable {
 public:
  void set(std::int64_t id, double us) { us_[id] = us; }

  bool contains(std::int64_t id) const { return us_.count(id) != 0; }

  double at(std::int64_t id) const {
    auto it = us_.find(id);
    if (it == us_.end())
      raise(ErrorCode::MissingLevels, "no level for op " + std::to_string(id), {id});
    return it->second;
  }

  std::size_t size() const { return us_.size(); }
  const std::unordered_map<std::int64_t, double>& entries() const { return us_; }

 private:
  std::unordered_map<std::int64_t, double> us_;
};

// ---------------------------------------------------------------------------
// Computation graph
// ---------------------------------------------------------------------------

/// Immutable DAG of operation specs. Constructed (and validated) only through
/// build_graph; safely shareable across threads afterwards.
class ComputationGraph {
 public:
  ComputationGraph() = default;

  const std::vector<OperationSpec>& ops() const { return ops_; }
  const std::vector<std::pair<std::int64_t, std::int64_t>>& edges() const { return edges_; }
  std::size_t num_ops() const { return ops_.size(); }

  bool has_id(std::int64_t id) const { return index_.count(id) != 0; }

  std::uint32_t index_of(std::int64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      raise(ErrorCode::InvalidArgument, "unknown op id " + std::to_string(id), {id});
    return it->second;
  }

  std::int64_t id_at(std::uint32_t idx) const { return ops_[idx].id; }
  const OperationSpec& op_at(std::uint32_t idx) const { return ops_[idx]; }
  const OperationSpec& op(std::int64_t id) const { return ops_[index_of(id)]; }

  // Index-based adjacency. Successor/predecessor lists are sorted by the
  // neighbor's op id.
  const std::vector<std::vector<std::uint32_t>>& successors() const { return succ_; }
  const std::vector<std::vector<std::uint32_t>>& predecessors() const { return pred_; }
  const std::vector<std::uint32_t>& indegree() const { return indegree_; }
  const std::vector<std::uint32_t>& successors(std::uint32_t idx) const { return succ_[idx]; }
  const std::vector<std::uint32_t>& predecessors(std::uint32_t idx) const { return pred_[idx]; }
  std::uint32_t indegree(std::uint32_t idx) const { return indegree_[idx]; }

  // Id-based conveniences.
  std::vector<std::int64_t> successors_of(std::int64_t id) const {
    std::vector<std::int64_t> out;
    for (std::uint32_t s : succ_[index_of(id)]) out.push_back(ops_[s].id);
    return out;
  }
  std::vector<std::int64_t> predecessors_of(std::int64_t id) const {
    std::vector<std::int64_t> out;
    for (std::uint32_t p : pred_[index_of(id)]) out.push_back(ops_[p].id);
    return out;
  }
  std::uint32_t indegree_of(std::int64_t id) const { return indegree_[index_of(id)]; }

  bool operator==(const ComputationGraph& other) const {
    return ops_ == other.ops_ && edges_ == other.edges_;
  }

 private:
  friend ComputationGraph build_graph(std::vector<OperationSpec>,
                                      std::vector<std::pair<std::int64_t, std::int64_t>>);

  std::vector<OperationSpec> ops_;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges_;
  std::unordered_map<std::int64_t, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> succ_;
  std::vector<std::vector<std::uint32_t>> pred_;
  std::vector<std::uint32_t> indegree_;
};

namespace detail {

// Returns the ids of one cycle among the given nodes (all of which lie on or
// lead into cycles). Walks successor links until a node repeats.
inline std::vector<std::int64_t> extract_cycle(
    const std::vector<OperationSpec>& ops, const std::vector<std::vector<std::uint32_t>>& succ,
    const std::vector<bool>& in_cycle_region) {
  std::uint32_t start = 0;
  for (std::uint32_t i = 0; i < ops.size(); ++i)
    if (in_cycle_region[i]) { start = i; break; }

  std::vector<std::int32_t> visited_at(ops.size(), -1);
  std::vector<std::uint32_t> walk;
  std::uint32_t cur = start;
  while (visited_at[cur] < 0) {
    visited_at[cur] = static_cast<std::int32_t>(walk.size());
    walk.push_back(cur);
    // Any successor still inside the cycle region continues the walk.
    std::uint32_t next = cur;
    for (std::uint32_t s : succ[cur]) {
      if (in_cycle_region[s]) { next = s; break; }
    }
    cur = next;
  }
  std::vector<std::int64_t> cycle;
  for (std::size_t i = static_cast<std::size_t>(visited_at[cur]); i < walk.size(); ++i)
    cycle.push_back(ops[walk[i]].id);
  return cycle;
}

}  // namespace detail

/// Validates and assembles a computation graph: unique non-negative ids,
/// edges over known ids, no self-loops, acyclic. Derived adjacency tables are
/// sorted by neighbor id.
inline ComputationGraph build_graph(
    std::vector<OperationSpec> ops,
    std::vector<std::pair<std::int64_t, std::int64_t>> edges) {
  ComputationGraph g;
  g.index_.reserve(ops.size());
  for (std::uint32_t i = 0; i < ops.size(); ++i) {
    validate_spec(ops[i]);
    auto [it, inserted] = g.index_.emplace(ops[i].id, i);
    if (!inserted)
      raise(ErrorCode::DuplicateId, "duplicate op id " + std::to_string(ops[i].id),
            {ops[i].id});
  }

  g.succ_.assign(ops.size(), {});
  g.pred_.assign(ops.size(), {});
  g.indegree_.assign(ops.size(), 0);

  std::set<std::pair<std::int64_t, std::int64_t>> seen_edges;
  for (const auto& [src, dst] : edges) {
    if (src == dst)
      raise(ErrorCode::SelfLoop, "self loop on op " + std::to_string(src), {src});
    if (!seen_edges.emplace(src, dst).second)
      raise(ErrorCode::InvalidArgument,
            "duplicate edge " + std::to_string(src) + " -> " + std::to_string(dst),
            {src, dst});
    auto si = g.index_.find(src);
    auto di = g.index_.find(dst);
    if (si == g.index_.end())
      raise(ErrorCode::DanglingEdge, "edge source " + std::to_string(src) + " is not an op",
            {src});
    if (di == g.index_.end())
      raise(ErrorCode::DanglingEdge, "edge target " + std::to_string(dst) + " is not an op",
            {dst});
    g.succ_[si->second].push_back(di->second);
    g.pred_[di->second].push_back(si->second);
    g.indegree_[di->second] += 1;
  }

  auto by_id = [&](std::uint32_t a, std::uint32_t b) { return ops[a].id < ops[b].id; };
  for (auto& v : g.succ_) std::sort(v.begin(), v.end(), by_id);
  for (auto& v : g.pred_) std::sort(v.begin(), v.end(), by_id);

  // Kahn's algorithm detects cycles; the surviving nodes contain one.
  std::vector<std::uint32_t> remaining = g.indegree_;
  std::size_t emitted = 0;
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> ready;
  for (std::uint32_t i = 0; i < ops.size(); ++i)
    if (remaining[i] == 0) ready.push(ops[i].id);
  while (!ready.empty()) {
    std::int64_t id = ready.top();
    ready.pop();
    ++emitted;
    for (std::uint32_t s : g.succ_[g.index_.at(id)])
      if (--remaining[s] == 0) ready.push(ops[s].id);
  }
  if (emitted != ops.size()) {
    std::vector<bool> region(ops.size(), false);
    for (std::uint32_t i = 0; i < ops.size(); ++i) region[i] = remaining[i] > 0;
    auto cycle = detail::extract_cycle(ops, g.succ_, region);
    std::string msg = "cycle through ops";
    for (auto id : cycle) msg += " " + std::to_string(id);
    raise(ErrorCode::CycleDetected, msg, cycle);
  }

  g.ops_ = std::move(ops);
  g.edges_ = std::move(edges);
  return g;
}

/// Deterministic topological order: every edge points forward, ties broken by
/// ascending op id.
inline std::vector<std::int64_t> topological_order(const ComputationGraph& graph) {
  std::vector<std::uint32_t> remaining = graph.indegree();
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> ready;
  for (std::uint32_t i = 0; i < graph.num_ops(); ++i)
    if (remaining[i] == 0) ready.push(graph.id_at(i));

  std::vector<std::int64_t> order;
  order.reserve(graph.num_ops());
  while (!ready.empty()) {
    std::int64_t id = ready.top();
    ready.pop();
    order.push_back(id);
    for (std::uint32_t s : graph.successors()[graph.index_of(id)])
      if (--remaining[s] == 0) ready.push(graph.id_at(s));
  }
  return order;
}

/// Same order as topological_order, as graph indices.
inline std::vector<std::uint32_t> topological_index_order(const ComputationGraph& graph) {
  std::vector<std::uint32_t> out;
  out.reserve(graph.num_ops());
  for (std::int64_t id : topological_order(graph)) out.push_back(graph.index_of(id));
  return out;
}

/// level(v) = duration(v) + max over successors' levels (0 for sinks),
/// computed in reverse topological order.
inline LevelTable compute_levels(const ComputationGraph& graph, const DurationTable& durations) {
  for (const auto& op : graph.ops())
    if (!durations.contains(op.id))
      raise(ErrorCode::MissingDuration, "no duration for op " + std::to_string(op.id), {op.id});

  std::vector<std::int64_t> order = topological_order(graph);
  std::vector<double> level(graph.num_ops(), 0.0);
  LevelTable table;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::uint32_t idx = graph.index_of(*it);
    double tail = 0.0;
    for (std::uint32_t s : graph.successors()[idx]) tail = std::max(tail, level[s]);
    level[idx] = durations.at(*it) + tail;
    table.set(*it, level[idx]);
  }
  return table;
}

/// Longest weighted root-to-sink path: the minimum possible makespan with
/// unlimited executors and zero overhead. Empty graph -> 0.
inline double critical_path_length(const ComputationGraph& graph,
                                   const DurationTable& durations) {
  LevelTable levels = compute_levels(graph, durations);
  double best = 0.0;
  for (std::uint32_t i = 0; i < graph.num_ops(); ++i)
    if (graph.indegree()[i] == 0) best = std::max(best, levels.at(graph.id_at(i)));
  return best;
}

/// Total duration across all ops; with the critical path this gives the
/// max(cp, work/m) lower bound used by the simulator and its oracle.
inline double total_work(const ComputationGraph& graph, const DurationTable& durations) {
  double sum = 0.0;
  for (const auto& op : graph.ops()) sum += durations.at(op.id);
  return sum;
}

}  // namespace graphi
