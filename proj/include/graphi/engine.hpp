#pragma once

// Parallel execution engine: a centralized scheduler running on the client
// thread dispatches ready operations to symmetric executors over single-slot
// SPSC buffers. Each executor owns a thread team and signals completions back
// on its own SPSC triggered queue, so no two threads ever contend on a shared
// structure. Small operations with a single dependency can be inlined into
// the predecessor's executor; indegree-zero small operations run on a
// dedicated light-weight executor so the wide executors stay free for the
// operations that actually parallelize.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <latch>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "graphi/error.hpp"
#include "graphi/graph.hpp"
#include "graphi/kernels.hpp"
#include "graphi/spsc_ring.hpp"
#include "graphi/tensor.hpp"
#include "graphi/thread_team.hpp"
#include "graphi/trace.hpp"

namespace graphi {

enum class SchedulePolicy { Cpf, Fifo, Lifo, PreferredExecutor };

inline const char* to_string(SchedulePolicy p) {
  switch (p) {
    case SchedulePolicy::Cpf: return "cpf";
    case SchedulePolicy::Fifo: return "fifo";
    case SchedulePolicy::Lifo: return "lifo";
    case SchedulePolicy::PreferredExecutor: return "preferred-executor";
  }
  return "?";
}

inline SchedulePolicy parse_policy(const std::string& s) {
  if (s == "cpf") return SchedulePolicy::Cpf;
  if (s == "fifo") return SchedulePolicy::Fifo;
  if (s == "lifo") return SchedulePolicy::Lifo;
  if (s == "preferred" || s == "preferred-executor") {
    return SchedulePolicy::PreferredExecutor;
  }
  raise(ErrorCode::InvalidArgument, "unknown policy '" + s + "'");
}

enum class PinMode { None, CompactTiles };

inline const char* to_string(PinMode p) {
  return p == PinMode::None ? "none" : "compact-tiles";
}

inline PinMode parse_pin_mode(const std::string& s) {
  if (s == "none") return PinMode::None;
  if (s == "compact-tiles") return PinMode::CompactTiles;
  raise(ErrorCode::InvalidArgument, "unknown pin mode '" + s + "'");
}

struct ExecutionConfig {
  int num_executors = 1;
  int threads_per_executor = 1;
  PinMode pinning = PinMode::None;
  int tile_size = 2;       // logical cores per physical tile
  int reserved_cores = 2;  // scheduler core + light-weight executor core
  SchedulePolicy policy = SchedulePolicy::Cpf;
  double spin_budget_us = 10.0;     // busy-poll budget before yielding
  double small_threshold_us = 5.0;  // ops at or below this are "small"
};

/// Core map for pinning = compact-tiles. Executor i pins its team to
/// executor_cores[i]; the team's control thread takes the first entry.
struct CoreAssignment {
  int scheduler_core = 0;
  int light_core = 1;
  std::vector<std::vector<int>> executor_cores;
};

/// Lays executors out on consecutive cores after the reserved ones.
/// Multi-threaded executors start at a tile boundary and occupy whole tiles,
/// so no tile is shared between two teams. Single-threaded executors pack
/// consecutively; exclusivity is vacuous for them.
inline CoreAssignment assign_cores(const ExecutionConfig& cfg,
                                   int total_cores = detected_cores()) {
  if (cfg.num_executors < 1 || cfg.threads_per_executor < 1 ||
      cfg.tile_size < 1 || cfg.reserved_cores < 2) {
    raise(ErrorCode::InvalidArgument, "invalid execution config");
  }
  if (cfg.threads_per_executor > 1 &&
      cfg.threads_per_executor % cfg.tile_size != 0) {
    raise(ErrorCode::InvalidArgument,
          "threads_per_executor must be a multiple of tile_size when > 1");
  }
  int exec_start = cfg.reserved_cores;
  if (cfg.threads_per_executor > 1) {
    exec_start = ((exec_start + cfg.tile_size - 1) / cfg.tile_size) *
                 cfg.tile_size;
  }
  int needed = exec_start + cfg.num_executors * cfg.threads_per_executor;
  if (needed > total_cores) {
    raise(ErrorCode::InsufficientCores,
          "need " + std::to_string(needed) + " cores, have " +
              std::to_string(total_cores));
  }
  CoreAssignment out;
  out.scheduler_core = 0;
  out.light_core = 1;
  out.executor_cores.resize(static_cast<std::size_t>(cfg.num_executors));
  int next = exec_start;
  for (auto& cores : out.executor_cores) {
    cores.resize(static_cast<std::size_t>(cfg.threads_per_executor));
    for (auto& c : cores) c = next++;
  }
  return out;
}

/// One scheduler decision, for inspection after run_iteration.
struct DispatchRecord {
  int step = 0;  // scheduler loop pass the decision was made in
  std::int64_t op_id = 0;
  int executor = 0;
  double level_us = 0.0;
};

class Engine {
 public:
  Engine(const ComputationGraph& graph, const ExecutionConfig& config,
         const LevelTable* levels, const DurationTable* durations)
      : graph_(graph), config_(config) {
    const std::size_t n = graph_.num_ops();
    needs_levels_ = config_.policy == SchedulePolicy::Cpf ||
                    config_.policy == SchedulePolicy::PreferredExecutor;
    if (needs_levels_ && levels == nullptr) {
      raise(ErrorCode::MissingLevels,
            "policy " + std::string(to_string(config_.policy)) +
                " requires level values");
    }
    level_by_idx_.assign(n, 0.0);
    if (levels != nullptr) {
      for (std::size_t i = 0; i < n; ++i) {
        level_by_idx_[i] = levels->at(graph_.id_at(i));
      }
    }
    classify_ops(durations);
    resolve_pinning();
    allocate_operands();

    remaining_.assign(n, 0);
    executed_by_.assign(n, -1);
    current_dispatch_.assign(static_cast<std::size_t>(num_executors()) + 1,
                             kNone);
    bitmap_ = ExecutorBitmap(static_cast<std::size_t>(num_executors()));
    const std::size_t qcap = n + 2;
    const std::size_t slot_count = static_cast<std::size_t>(num_executors()) + 1;
    std::latch ready(static_cast<std::ptrdiff_t>(slot_count));
    slots_.reserve(slot_count);
    for (std::size_t e = 0; e < slot_count; ++e) {
      slots_.push_back(std::make_unique<ExecutorSlot>());
      auto* slot = slots_.back().get();
      slot->id = static_cast<int>(e);
      slot->triggered = std::make_unique<SpscQueue<std::uint32_t>>(qcap);
      slot->events.reserve(n);
      bool is_light = slot->id == light_executor_id();
      slot->thread = std::thread([this, slot, &ready, is_light] {
        executor_main(*slot, is_light, ready);
      });
    }
    ready.wait();
  }

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ~Engine() { shutdown(); }

  int num_executors() const { return config_.num_executors; }
  int light_executor_id() const { return config_.num_executors; }
  const ExecutionConfig& config() const { return config_; }
  const ComputationGraph& graph() const { return graph_; }
  bool poisoned() const { return poisoned_.load(std::memory_order_acquire); }
  bool pinning_applied() const { return pinning_applied_; }
  const std::string& pinning_note() const { return pinning_note_; }
  const std::vector<bool>& inlined_ops() const { return inlined_; }
  const std::vector<bool>& bootstrap_ops() const { return bootstrap_; }
  const std::vector<DispatchRecord>& dispatch_log() const {
    return dispatch_log_;
  }

  /// Testing hook: the next execution of op_id throws inside the executor.
  void inject_fault(std::int64_t op_id) {
    fault_op_.store(op_id, std::memory_order_release);
  }

  /// Executes the whole graph once and returns the trace. Throws
  /// ExecutorPanic if an operation fails (the engine is then poisoned and
  /// rejects further iterations with EnginePoisoned).
  Trace run_iteration() {
    if (stopped_) {
      raise(ErrorCode::InvalidArgument, "engine already shut down");
    }
    if (poisoned()) {
      raise(ErrorCode::EnginePoisoned,
            "engine poisoned by an earlier executor failure");
    }
    prepare_iteration();
    const std::size_t n = graph_.num_ops();
    int step = 0;
    while (completed_ < n) {
      ++step;
      bool progressed = poll_completions();
      progressed |= dispatch_ready(step);
      if (poisoned()) abort_iteration();
      if (!progressed) polite_wait();
    }
    return assemble_trace();
  }

  /// Stops and joins all executor threads. Idempotent.
  void shutdown() {
    if (stopped_) return;
    stop_.store(true, std::memory_order_release);
    for (auto& slot : slots_) {
      if (slot->thread.joinable()) slot->thread.join();
    }
    stopped_ = true;
  }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  struct ExecutorSlot {
    int id = 0;
    OperationBuffer buffer;  // scheduler -> executor, capacity 1
    std::unique_ptr<SpscQueue<std::uint32_t>> triggered;  // executor -> sched
    std::vector<TraceEvent> events;  // touched only while the op runs
    std::thread thread;
  };

  struct OperandSet {
    std::vector<Tensor> inputs;
    std::optional<Tensor> output;
    std::vector<std::uint64_t> buffer_ids;
  };

  // Marks each op small / bootstrap / inlined. Without durations only
  // synthetic ops at or below the threshold count as small (their cost is
  // declared); with durations any op at or below the threshold does.
  // Inlining is decided in topological order: an op is inlined iff it is
  // small, has exactly one predecessor, and that predecessor is neither
  // inlined nor a bootstrap op. The executor that runs the predecessor runs
  // the inlined op in the same dispatch, so a chain never spans executors
  // and never exceeds depth one past a scheduled op.
  void classify_ops(const DurationTable* durations) {
    const std::size_t n = graph_.num_ops();
    small_.assign(n, false);
    bootstrap_.assign(n, false);
    inlined_.assign(n, false);
    chain_last_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& op = graph_.op_at(i);
      bool small = op.small;
      if (durations != nullptr) {
        small = small ||
                durations->at(op.id) <= config_.small_threshold_us;
      } else if (const auto* syn = std::get_if<SyntheticOp>(&op.kind)) {
        small = small || syn->us <= config_.small_threshold_us;
      }
      small_[i] = small;
      bootstrap_[i] = small && graph_.indegree(i) == 0;
    }
    for (std::uint32_t idx : topological_index_order(graph_)) {
      if (!small_[idx] || bootstrap_[idx]) continue;
      const auto& preds = graph_.predecessors(idx);
      if (preds.size() != 1) continue;
      std::uint32_t p = preds[0];
      if (inlined_[p] || bootstrap_[p]) continue;
      inlined_[idx] = true;
    }
    // chain_last_[i]: the id the scheduler waits for before marking the
    // executor idle again. Inlined successors run in ascending id order, so
    // the chain ends at the largest inlined successor, or at i itself.
    for (std::size_t i = 0; i < n; ++i) {
      chain_last_[i] = static_cast<std::uint32_t>(i);
      for (std::uint32_t s : graph_.successors(static_cast<std::uint32_t>(i))) {
        if (inlined_[s]) chain_last_[i] = s;
      }
    }
  }

  void resolve_pinning() {
    pinning_applied_ = false;
    if (config_.pinning == PinMode::None) return;
    const char* no_pin = std::getenv("GRAPHI_NO_PIN");
    if (no_pin != nullptr && std::string(no_pin) == "1") {
      pinning_note_ = "pinning disabled by GRAPHI_NO_PIN=1";
      return;
    }
    assignment_ = assign_cores(config_);  // throws InsufficientCores
    PinResult r = pin_thread(assignment_->scheduler_core);
    if (r != PinResult::Ok) {
      pinning_note_ = "pinning unsupported on this host, running unpinned";
      assignment_.reset();
      return;
    }
    pinning_applied_ = true;
  }

  // Operand tensors are preallocated once and reused every iteration, so the
  // measured interval contains no allocation. Contents are deterministic in
  // the op id.
  void allocate_operands() {
    const std::size_t n = graph_.num_ops();
    operands_.resize(n);
    std::uint64_t next_buffer = 1;
    for (std::size_t i = 0; i < n; ++i) {
      auto& set = operands_[i];
      const auto& op = graph_.op_at(i);
      auto seed = static_cast<std::uint64_t>(op.id);
      if (const auto* mm = std::get_if<MatMulOp>(&op.kind)) {
        set.inputs.push_back(make_matrix(mm->m, mm->k));
        set.inputs.push_back(make_matrix(mm->k, mm->n));
        set.output = make_matrix(mm->m, mm->n);
      } else if (const auto* ew = std::get_if<ElementwiseOp>(&op.kind)) {
        set.inputs.push_back(make_vector(ew->len));
        if (is_binary(ew->op)) set.inputs.push_back(make_vector(ew->len));
        set.output = make_vector(ew->len);
      }
      for (std::size_t j = 0; j < set.inputs.size(); ++j) {
        set.inputs[j].fill_random(seed * 4 + j);
        set.buffer_ids.push_back(next_buffer++);
      }
      if (set.output.has_value()) set.buffer_ids.push_back(next_buffer++);
    }
  }

  void executor_main(ExecutorSlot& slot, bool is_light, std::latch& ready) {
    std::vector<int> cores;
    if (assignment_.has_value()) {
      if (is_light) {
        cores = {assignment_->light_core};
      } else {
        cores = assignment_->executor_cores[static_cast<std::size_t>(slot.id)];
      }
      if (pin_thread(cores[0]) != PinResult::Ok) cores.clear();
    }
    int team_size = is_light ? 1 : config_.threads_per_executor;
    ThreadTeam team(team_size, cores);
    ready.count_down();
    std::uint32_t idx = 0;
    while (!stop_.load(std::memory_order_acquire)) {
      if (slot.buffer.pop(idx)) {
        run_chain(slot, team, idx);
        continue;
      }
      polite_wait();
    }
  }

  // Runs the dispatched op, then its inlined successors in ascending id
  // order. Every op in the chain gets a completion push even if execution
  // failed, so the scheduler's idle accounting stays exact while it drains.
  void run_chain(ExecutorSlot& slot, ThreadTeam& team, std::uint32_t idx) {
    bool ok = exec_one(slot, team, idx);
    for (std::uint32_t s : graph_.successors(idx)) {
      if (!inlined_[s]) continue;
      if (ok) {
        ok = exec_one(slot, team, s);
      } else {
        push_completion(slot, s);
      }
    }
  }

  bool exec_one(ExecutorSlot& slot, ThreadTeam& team, std::uint32_t idx) {
    const auto& op = graph_.op_at(idx);
    auto& set = operands_[idx];
    double start = now_us() - iter_t0_;
    bool ok = true;
    try {
      if (fault_op_.load(std::memory_order_acquire) == op.id) {
        throw std::runtime_error("injected fault");
      }
      if (const auto* mm = std::get_if<MatMulOp>(&op.kind)) {
        matmul_into(set.inputs[0], set.inputs[1], *set.output, team);
        (void)mm;
      } else if (const auto* ew = std::get_if<ElementwiseOp>(&op.kind)) {
        const Tensor* y = is_binary(ew->op) ? &set.inputs[1] : nullptr;
        elementwise_into(ew->op, set.inputs[0], y, *set.output, team);
      } else {
        synthetic_delay(std::get<SyntheticOp>(op.kind).us, team);
      }
      double end = now_us() - iter_t0_;
      slot.events.push_back(
          {op.id, slot.id, start, end, set.buffer_ids});
    } catch (const std::exception& e) {
      {
        std::lock_guard<std::mutex> lk(error_mutex_);
        if (error_message_.empty()) {
          error_message_ = e.what();
          error_op_ = op.id;
        }
      }
      poisoned_.store(true, std::memory_order_release);
      ok = false;
    }
    push_completion(slot, idx);
    return ok;
  }

  void push_completion(ExecutorSlot& slot, std::uint32_t idx) {
    // Capacity covers every op, so this succeeds on the first try.
    while (!slot.triggered->push(idx)) std::this_thread::yield();
  }

  void polite_wait() const {
    double deadline = now_us() + config_.spin_budget_us;
    while (now_us() < deadline) {
      // busy poll keeps dispatch latency low when cores are plentiful
    }
    std::this_thread::yield();
  }

  // ---- scheduler side (client thread only) ----

  void prepare_iteration() {
    const std::size_t n = graph_.num_ops();
    for (auto& slot : slots_) slot->events.clear();
    for (std::size_t i = 0; i < n; ++i) {
      remaining_[i] = static_cast<std::uint32_t>(graph_.indegree(i));
    }
    std::fill(executed_by_.begin(), executed_by_.end(), -1);
    std::fill(current_dispatch_.begin(), current_dispatch_.end(), kNone);
    bitmap_.set_all();
    light_idle_ = true;
    completed_ = 0;
    ready_heap_ = {};
    ready_fifo_.clear();
    ready_lifo_.clear();
    light_fifo_.clear();
    dispatch_log_.clear();
    iter_t0_ = now_us();
    for (std::uint32_t i = 0; i < n; ++i) {
      if (graph_.indegree(i) != 0) continue;
      if (bootstrap_[i]) {
        light_fifo_.push_back(i);
      } else {
        insert_ready(i);
      }
    }
    // simultaneous LIFO insertions pop in ascending id order
    if (config_.policy == SchedulePolicy::Lifo) {
      std::reverse(ready_lifo_.begin(), ready_lifo_.end());
    }
  }

  void insert_ready(std::uint32_t idx) {
    switch (config_.policy) {
      case SchedulePolicy::Cpf:
      case SchedulePolicy::PreferredExecutor:
        ready_heap_.push({level_by_idx_[idx], idx});
        break;
      case SchedulePolicy::Fifo:
        ready_fifo_.push_back(idx);
        break;
      case SchedulePolicy::Lifo:
        ready_lifo_.push_back(idx);
        break;
    }
  }

  bool ready_empty() const {
    switch (config_.policy) {
      case SchedulePolicy::Cpf:
      case SchedulePolicy::PreferredExecutor:
        return ready_heap_.empty();
      case SchedulePolicy::Fifo:
        return ready_fifo_.empty();
      case SchedulePolicy::Lifo:
        return ready_lifo_.empty();
    }
    return true;
  }

  std::uint32_t pop_ready() {
    switch (config_.policy) {
      case SchedulePolicy::Cpf:
      case SchedulePolicy::PreferredExecutor: {
        std::uint32_t idx = ready_heap_.top().second;
        ready_heap_.pop();
        return idx;
      }
      case SchedulePolicy::Fifo: {
        std::uint32_t idx = ready_fifo_.front();
        ready_fifo_.pop_front();
        return idx;
      }
      case SchedulePolicy::Lifo: {
        std::uint32_t idx = ready_lifo_.back();
        ready_lifo_.pop_back();
        return idx;
      }
    }
    raise(ErrorCode::InvalidArgument, "unreachable");
  }

  bool poll_completions() {
    bool progressed = false;
    for (auto& slot : slots_) {
      std::uint32_t c = 0;
      while (slot->triggered->pop(c)) {
        progressed = true;
        ++completed_;
        if (!poisoned()) {
          // LIFO wants the newly ready batch popped in ascending id order,
          // so it is pushed in reverse.
          std::size_t batch_start = ready_lifo_.size();
          for (std::uint32_t s : graph_.successors(c)) {
            if (--remaining_[s] == 0 && !inlined_[s]) insert_ready(s);
          }
          if (config_.policy == SchedulePolicy::Lifo) {
            std::reverse(ready_lifo_.begin() +
                             static_cast<std::ptrdiff_t>(batch_start),
                         ready_lifo_.end());
          }
        }
        std::uint32_t cur =
            current_dispatch_[static_cast<std::size_t>(slot->id)];
        if (cur != kNone && c == chain_last_[cur]) {
          mark_idle(slot->id);
        }
      }
    }
    return progressed;
  }

  void mark_idle(int executor) {
    current_dispatch_[static_cast<std::size_t>(executor)] = kNone;
    if (executor == light_executor_id()) {
      light_idle_ = true;
    } else {
      bitmap_.set(static_cast<std::size_t>(executor));
    }
  }

  bool dispatch_ready(int step) {
    bool progressed = false;
    if (light_idle_ && !light_fifo_.empty()) {
      std::uint32_t idx = light_fifo_.front();
      light_fifo_.pop_front();
      dispatch_to(light_executor_id(), idx, step);
      light_idle_ = false;
      progressed = true;
    }
    while (!ready_empty()) {
      auto exec = find_executor(bitmap_);
      if (!exec.has_value()) break;
      std::uint32_t idx = pop_ready();
      int e = static_cast<int>(*exec);
      if (config_.policy == SchedulePolicy::PreferredExecutor) {
        int pref = preferred_executor(idx);
        if (pref >= 0 && bitmap_.test(static_cast<std::size_t>(pref))) {
          e = pref;
        }
      }
      dispatch_to(e, idx, step);
      bitmap_.clear(static_cast<std::size_t>(e));
      progressed = true;
    }
    return progressed;
  }

  // Preferred executor: the one that produced the op's latest-finishing
  // predecessor this iteration, approximated as the executor of the highest
  // level predecessor. -1 when there is none.
  int preferred_executor(std::uint32_t idx) const {
    int best = -1;
    double best_level = -1.0;
    for (std::uint32_t p : graph_.predecessors(idx)) {
      if (executed_by_[p] >= 0 && level_by_idx_[p] > best_level) {
        best_level = level_by_idx_[p];
        best = executed_by_[p];
      }
    }
    return best;
  }

  void dispatch_to(int executor, std::uint32_t idx, int step) {
    current_dispatch_[static_cast<std::size_t>(executor)] = idx;
    executed_by_[idx] = executor;
    for (std::uint32_t s : graph_.successors(idx)) {
      if (inlined_[s]) executed_by_[s] = executor;
    }
    dispatch_log_.push_back(
        {step, graph_.id_at(idx), executor, level_by_idx_[idx]});
    auto& slot = *slots_[static_cast<std::size_t>(executor)];
    while (!slot.buffer.push(idx)) std::this_thread::yield();
  }

  // On failure the scheduler stops dispatching, waits for in-flight chains
  // to finish (their completion pushes are unconditional), and reports the
  // first error. The engine stays poisoned.
  [[noreturn]] void abort_iteration() {
    while (!(bitmap_.all() && light_idle_)) {
      bool progressed = false;
      for (auto& slot : slots_) {
        std::uint32_t c = 0;
        while (slot->triggered->pop(c)) {
          progressed = true;
          std::uint32_t cur =
              current_dispatch_[static_cast<std::size_t>(slot->id)];
          if (cur != kNone && c == chain_last_[cur]) mark_idle(slot->id);
        }
      }
      if (!progressed) polite_wait();
    }
    std::string message;
    std::int64_t op = -1;
    {
      std::lock_guard<std::mutex> lk(error_mutex_);
      message = error_message_;
      op = error_op_;
    }
    raise(ErrorCode::ExecutorPanic,
          "operation " + std::to_string(op) + " failed: " + message, {op});
  }

  Trace assemble_trace() {
    Trace trace;
    trace.pinning_applied = pinning_applied_;
    trace.note = pinning_note_;
    for (auto& slot : slots_) {
      trace.events.insert(trace.events.end(), slot->events.begin(),
                          slot->events.end());
    }
    std::sort(trace.events.begin(), trace.events.end(),
              [](const TraceEvent& a, const TraceEvent& b) {
                if (a.start_us != b.start_us) return a.start_us < b.start_us;
                return a.op_id < b.op_id;
              });
    return trace;
  }

  // max-heap by level, ties to the smaller op index
  struct HeapLess {
    bool operator()(const std::pair<double, std::uint32_t>& a,
                    const std::pair<double, std::uint32_t>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return a.second > b.second;
    }
  };

  ComputationGraph graph_;
  ExecutionConfig config_;
  bool needs_levels_ = false;
  std::vector<double> level_by_idx_;
  std::vector<bool> small_;
  std::vector<bool> bootstrap_;
  std::vector<bool> inlined_;
  std::vector<std::uint32_t> chain_last_;
  std::vector<OperandSet> operands_;

  std::optional<CoreAssignment> assignment_;
  bool pinning_applied_ = false;
  std::string pinning_note_;

  std::vector<std::unique_ptr<ExecutorSlot>> slots_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> poisoned_{false};
  std::atomic<std::int64_t> fault_op_{-1};
  std::mutex error_mutex_;
  std::string error_message_;
  std::int64_t error_op_ = -1;
  bool stopped_ = false;

  // iteration state, owned by the scheduler thread
  double iter_t0_ = 0.0;
  std::size_t completed_ = 0;
  std::vector<std::uint32_t> remaining_;
  std::vector<std::uint32_t> current_dispatch_;
  std::vector<int> executed_by_;
  ExecutorBitmap bitmap_{0};
  bool light_idle_ = true;
  std::priority_queue<std::pair<double, std::uint32_t>,
                      std::vector<std::pair<double, std::uint32_t>>, HeapLess>
      ready_heap_;
  std::deque<std::uint32_t> ready_fifo_;
  std::vector<std::uint32_t> ready_lifo_;
  std::deque<std::uint32_t> light_fifo_;
  std::vector<DispatchRecord> dispatch_log_;
};

inline std::unique_ptr<Engine> start_engine(
    const ComputationGraph& graph, const ExecutionConfig& config,
    const LevelTable* levels = nullptr,
    const DurationTable* durations = nullptr) {
  if (config.num_executors < 1) {
    raise(ErrorCode::InvalidArgument, "num_executors must be >= 1");
  }
  if (config.threads_per_executor < 1) {
    raise(ErrorCode::InvalidArgument, "threads_per_executor must be >= 1");
  }
  if (config.spin_budget_us < 0 || config.small_threshold_us < 0) {
    raise(ErrorCode::InvalidArgument, "budgets must be non-negative");
  }
  return std::make_unique<Engine>(graph, config, levels, durations);
}

}  // namespace graphi
