#pragma once

// Discrete-event simulator for the dispatch policies, and an exhaustive
// branch-and-bound solver for the true optimal makespan on small instances.
// The simulator models m identical executors with zero scheduling overhead:
// completions are processed in (time, executor id) order, and newly ready
// operations are dispatched at the completion instant. It deliberately omits
// the engine's light-weight executor and small-op inlining so that a policy's
// simulated makespan reflects the policy alone.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "graphi/engine.hpp"
#include "graphi/error.hpp"
#include "graphi/graph.hpp"
#include "graphi/trace.hpp"

namespace graphi {

struct SimResult {
  double makespan_us = 0.0;
  std::vector<TraceEvent> events;
  std::vector<std::int64_t> dispatch_order;
};

namespace detail {

// Policy-ordered ready pool shared by the simulator. Mirrors the engine's
// containers: max-heap on level for cpf/preferred (ties to the smaller
// index), queue for fifo, stack with per-batch reversal for lifo so
// simultaneous ties pop in ascending index order.
class ReadyPool {
 public:
  ReadyPool(SchedulePolicy policy, const std::vector<double>* levels)
      : policy_(policy), levels_(levels) {}

  void insert_batch(const std::vector<std::uint32_t>& batch) {
    switch (policy_) {
      case SchedulePolicy::Cpf:
      case SchedulePolicy::PreferredExecutor:
        for (std::uint32_t i : batch) heap_.push({(*levels_)[i], i});
        break;
      case SchedulePolicy::Fifo:
        for (std::uint32_t i : batch) fifo_.push_back(i);
        break;
      case SchedulePolicy::Lifo:
        for (auto it = batch.rbegin(); it != batch.rend(); ++it) {
          lifo_.push_back(*it);
        }
        break;
    }
  }

  bool empty() const {
    switch (policy_) {
      case SchedulePolicy::Cpf:
      case SchedulePolicy::PreferredExecutor:
        return heap_.empty();
      case SchedulePolicy::Fifo:
        return fifo_.empty();
      case SchedulePolicy::Lifo:
        return lifo_.empty();
    }
    return true;
  }

  std::uint32_t pop() {
    switch (policy_) {
      case SchedulePolicy::Cpf:
      case SchedulePolicy::PreferredExecutor: {
        std::uint32_t i = heap_.top().second;
        heap_.pop();
        return i;
      }
      case SchedulePolicy::Fifo: {
        std::uint32_t i = fifo_.front();
        fifo_.pop_front();
        return i;
      }
      case SchedulePolicy::Lifo: {
        std::uint32_t i = lifo_.back();
        lifo_.pop_back();
        return i;
      }
    }
    raise(ErrorCode::InvalidArgument, "unreachable");
  }

 private:
  struct Less {
    bool operator()(const std::pair<double, std::uint32_t>& a,
                    const std::pair<double, std::uint32_t>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return a.second > b.second;
    }
  };
  SchedulePolicy policy_;
  const std::vector<double>* levels_;
  std::priority_queue<std::pair<double, std::uint32_t>,
                      std::vector<std::pair<double, std::uint32_t>>, Less>
      heap_;
  std::deque<std::uint32_t> fifo_;
  std::vector<std::uint32_t> lifo_;
};

}  // namespace detail

inline SimResult simulate(const ComputationGraph& graph,
                          const DurationTable& durations,
                          const LevelTable* levels, int m,
                          SchedulePolicy policy) {
  if (m < 1) raise(ErrorCode::InvalidArgument, "m must be >= 1");
  bool needs_levels = policy == SchedulePolicy::Cpf ||
                      policy == SchedulePolicy::PreferredExecutor;
  if (needs_levels && levels == nullptr) {
    raise(ErrorCode::MissingLevels,
          "policy " + std::string(to_string(policy)) +
              " requires level values");
  }
  const std::size_t n = graph.num_ops();
  std::vector<double> dur(n, 0.0);
  std::vector<double> level(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    dur[i] = durations.at(graph.id_at(i));
    if (levels != nullptr) level[i] = levels->at(graph.id_at(i));
  }

  std::vector<std::uint32_t> remaining(n, 0);
  std::vector<double> finish(n, 0.0);
  std::vector<int> executed_by(n, -1);
  std::vector<double> free_at(static_cast<std::size_t>(m), 0.0);
  std::vector<bool> idle(static_cast<std::size_t>(m), true);
  detail::ReadyPool ready(policy, &level);

  std::vector<std::uint32_t> batch;
  for (std::uint32_t i = 0; i < n; ++i) {
    remaining[i] = static_cast<std::uint32_t>(graph.indegree(i));
    if (remaining[i] == 0) batch.push_back(i);
  }
  ready.insert_batch(batch);

  // (finish time, executor, op) min-heap; completions at equal times are
  // handled in executor id order.
  using Pending = std::tuple<double, int, std::uint32_t>;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>>
      pending;

  SimResult out;
  out.events.reserve(n);
  double now = 0.0;
  std::size_t done = 0;
  while (done < n) {
    while (!ready.empty()) {
      int exec = -1;
      for (int e = 0; e < m; ++e) {
        if (idle[static_cast<std::size_t>(e)]) {
          exec = e;
          break;
        }
      }
      if (exec < 0) break;
      std::uint32_t op = ready.pop();
      if (policy == SchedulePolicy::PreferredExecutor) {
        int pref = -1;
        double latest = -1.0;
        for (std::uint32_t p : graph.predecessors(op)) {
          if (finish[p] > latest) {
            latest = finish[p];
            pref = executed_by[p];
          }
        }
        if (pref >= 0 && idle[static_cast<std::size_t>(pref)]) exec = pref;
      }
      double end = now + dur[op];
      idle[static_cast<std::size_t>(exec)] = false;
      free_at[static_cast<std::size_t>(exec)] = end;
      finish[op] = end;
      executed_by[op] = exec;
      out.events.push_back({graph.id_at(op), exec, now, end, {}});
      out.dispatch_order.push_back(graph.id_at(op));
      pending.push({end, exec, op});
    }
    if (pending.empty()) break;  // unreachable for a validated DAG
    now = std::get<0>(pending.top());
    batch.clear();
    while (!pending.empty() && std::get<0>(pending.top()) == now) {
      auto [t, exec, op] = pending.top();
      pending.pop();
      idle[static_cast<std::size_t>(exec)] = true;
      ++done;
      for (std::uint32_t s : graph.successors(op)) {
        if (--remaining[s] == 0) batch.push_back(s);
      }
    }
    ready.insert_batch(batch);
  }
  for (const auto& ev : out.events) {
    out.makespan_us = std::max(out.makespan_us, ev.end_us);
  }
  return out;
}

/// Simulates every policy at the same executor count.
inline std::vector<std::pair<SchedulePolicy, double>> compare_policies(
    const ComputationGraph& graph, const DurationTable& durations,
    const LevelTable& levels, int m) {
  std::vector<std::pair<SchedulePolicy, double>> out;
  for (auto policy :
       {SchedulePolicy::Cpf, SchedulePolicy::Fifo, SchedulePolicy::Lifo,
        SchedulePolicy::PreferredExecutor}) {
    out.push_back(
        {policy, simulate(graph, durations, &levels, m, policy).makespan_us});
  }
  return out;
}

namespace detail {

// Exhaustive search over semi-active schedules: repeatedly pick a dependency
// satisfied op and a machine, start the op as early as that machine and its
// predecessors allow. Any feasible schedule can be replayed in start-time
// order without finishing later, so this enumeration contains an optimum.
class OptimalSearch {
 public:
  OptimalSearch(const ComputationGraph& graph, const std::vector<double>& dur,
                const std::vector<double>& tail, int m)
      : graph_(graph), dur_(dur), tail_(tail), m_(m) {
    const std::size_t n = graph_.num_ops();
    finish_.assign(n, -1.0);
    remaining_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      remaining_[i] = static_cast<std::uint32_t>(graph_.indegree(i));
    }
    free_at_.assign(static_cast<std::size_t>(m_), 0.0);
  }

  double solve(double incumbent) {
    best_ = incumbent;
    dfs(0, 0.0);
    return best_;
  }

 private:
  // Longest remaining path through unscheduled ops, seeded with each op's
  // earliest start given the partial schedule. Admissible: no unscheduled op
  // can finish before est + dur, and its downstream tail must still run.
  double lower_bound() const {
    const std::size_t n = graph_.num_ops();
    double lb = 0.0;
    std::vector<double> est(n, 0.0);
    for (std::uint32_t i : topo_) {
      if (finish_[i] >= 0.0) continue;
      double s = 0.0;
      for (std::uint32_t p : graph_.predecessors(i)) {
        s = std::max(s, finish_[p] >= 0.0 ? finish_[p] : est[p] + dur_[p]);
      }
      est[i] = s;
      lb = std::max(lb, s + dur_[i] + tail_[i]);
    }
    return lb;
  }

  void dfs(std::size_t placed, double makespan) {
    const std::size_t n = graph_.num_ops();
    if (placed == n) {
      best_ = std::min(best_, makespan);
      return;
    }
    if (makespan >= best_) return;
    if (topo_.empty()) topo_ = topological_index_order(graph_);
    if (lower_bound() >= best_) return;
    for (std::uint32_t op = 0; op < n; ++op) {
      if (finish_[op] >= 0.0 || remaining_[op] != 0) continue;
      double pred_done = 0.0;
      for (std::uint32_t p : graph_.predecessors(op)) {
        pred_done = std::max(pred_done, finish_[p]);
      }
      // identical machines: one try per distinct free time
      double tried = std::numeric_limits<double>::quiet_NaN();
      for (int e = 0; e < m_; ++e) {
        double f = free_at_[static_cast<std::size_t>(e)];
        if (f == tried) continue;
        bool seen = false;
        for (int e2 = 0; e2 < e; ++e2) {
          if (free_at_[static_cast<std::size_t>(e2)] == f) {
            seen = true;
            break;
          }
        }
        if (seen) continue;
        tried = f;
        double start = std::max(f, pred_done);
        double end = start + dur_[op];
        if (end + tail_[op] >= best_) continue;
        finish_[op] = end;
        free_at_[static_cast<std::size_t>(e)] = end;
        for (std::uint32_t s : graph_.successors(op)) --remaining_[s];
        dfs(placed + 1, std::max(makespan, end));
        for (std::uint32_t s : graph_.successors(op)) ++remaining_[s];
        finish_[op] = -1.0;
        free_at_[static_cast<std::size_t>(e)] = f;
      }
    }
  }

  const ComputationGraph& graph_;
  const std::vector<double>& dur_;
  const std::vector<double>& tail_;
  int m_;
  std::vector<double> finish_;
  std::vector<std::uint32_t> remaining_;
  std::vector<double> free_at_;
  std::vector<std::uint32_t> topo_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace detail

/// True optimal makespan on m executors, by branch and bound over
/// semi-active schedules. Exhaustive, so limited to 12 ops and 4 executors;
/// larger instances raise TooLarge.
inline double optimal_makespan(const ComputationGraph& graph,
                               const DurationTable& durations, int m) {
  if (m < 1) raise(ErrorCode::InvalidArgument, "m must be >= 1");
  if (graph.num_ops() > 12 || m > 4) {
    raise(ErrorCode::TooLarge,
          "exhaustive search is capped at 12 ops and 4 executors");
  }
  if (graph.num_ops() == 0) return 0.0;
  const std::size_t n = graph.num_ops();
  std::vector<double> dur(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) dur[i] = durations.at(graph.id_at(i));
  LevelTable levels = compute_levels(graph, durations);
  std::vector<double> tail(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    tail[i] = levels.at(graph.id_at(i)) - dur[i];
  }
  double incumbent =
      simulate(graph, durations, &levels, m, SchedulePolicy::Cpf).makespan_us;
  detail::OptimalSearch search(graph, dur, tail, m);
  // the cpf schedule itself is feasible, so the optimum is at most incumbent
  return std::min(incumbent, search.solve(incumbent + 1e-9));
}

}  // namespace graphi
