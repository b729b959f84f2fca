#pragma once

// Microbenchmarks behind the bench command: kernel scaling over team sizes,
// and the dispatch-channel contention comparison (per-executor SPSC buffers
// against one mutex-guarded shared queue). Results are measurements to look
// at, not asserted numbers; they depend entirely on the host.

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "graphi/kernels.hpp"
#include "graphi/spsc_ring.hpp"
#include "graphi/tensor.hpp"
#include "graphi/thread_team.hpp"

namespace graphi {

struct BenchRow {
  std::string kernel;
  int teams = 1;
  int threads_per_team = 1;
  bool pinned = false;
  double value = 0.0;
  std::string unit;
};

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "kernel,teams,threads_per_team,pinned,value,unit\n";
  for (const auto& r : rows) {
    out << r.kernel << ',' << r.teams << ',' << r.threads_per_team << ','
        << (r.pinned ? "true" : "false") << ',' << r.value << ',' << r.unit
        << '\n';
  }
  return out.str();
}

namespace detail {

inline std::vector<int> bench_cores(int threads, bool pinned) {
  if (!pinned) return {};
  std::vector<int> cores(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) cores[static_cast<std::size_t>(i)] = i;
  return cores;
}

}  // namespace detail

/// One 64x512 by 512x512 matmul per rep on a single team of the given size.
inline BenchRow bench_matmul(int team_size, bool pinned, int reps = 20) {
  Tensor a = make_matrix(64, 512);
  Tensor b = make_matrix(512, 512);
  a.fill_random(1);
  b.fill_random(2);
  Tensor c = make_matrix(64, 512);
  ThreadTeam team(team_size, detail::bench_cores(team_size, pinned));
  matmul_into(a, b, c, team);  // warm
  double t0 = now_us();
  for (int r = 0; r < reps; ++r) matmul_into(a, b, c, team);
  double elapsed_us = now_us() - t0;
  double flops = 2.0 * 64 * 512 * 512 * reps;
  return {"matmul", 1, team_size, pinned, flops / (elapsed_us * 1e3),
          "GFLOPS"};
}

/// Elementwise multiply over 32768 pairs per rep.
inline BenchRow bench_elementwise(int team_size, bool pinned,
                                  int reps = 2000) {
  const std::int64_t len = 32768;
  Tensor x = make_vector(len);
  Tensor y = make_vector(len);
  x.fill_random(3);
  y.fill_random(4);
  Tensor out = make_vector(len);
  ThreadTeam team(team_size, detail::bench_cores(team_size, pinned));
  elementwise_into(EwKind::Mul, x, &y, out, team);  // warm
  double t0 = now_us();
  for (int r = 0; r < reps; ++r) {
    elementwise_into(EwKind::Mul, x, &y, out, team);
  }
  double elapsed_us = now_us() - t0;
  double ops = static_cast<double>(len) * reps;
  return {"elementwise", 1, team_size, pinned, ops / (elapsed_us * 1e3),
          "Gop/s"};
}

namespace detail {

struct ContentionSlot {
  OperationBuffer buffer;
  std::unique_ptr<SpscQueue<std::uint32_t>> done;
  std::thread thread;
};

}  // namespace detail

struct ContentionResult {
  double spsc_ops_per_sec = 0.0;
  double shared_ops_per_sec = 0.0;
};

/// Runs total_ops spin ops of op_us through (a) per-executor capacity-1
/// buffers fed by a central dispatcher and drained over per-executor done
/// queues, and (b) one mutex-guarded queue all workers pop from. The first
/// mirrors the engine's wiring, the second the contended design it avoids.
inline ContentionResult bench_contention(int executors, double op_us = 10.0,
                                         int total_ops = 2000) {
  if (executors < 1) {
    raise(ErrorCode::InvalidArgument, "executors must be >= 1");
  }
  ContentionResult result;

  {  // per-executor SPSC channels
    std::vector<std::unique_ptr<detail::ContentionSlot>> slots;
    std::atomic<bool> stop{false};
    for (int e = 0; e < executors; ++e) {
      slots.push_back(std::make_unique<detail::ContentionSlot>());
      auto* slot = slots.back().get();
      slot->done = std::make_unique<SpscQueue<std::uint32_t>>(
          static_cast<std::size_t>(total_ops) + 2);
      slot->thread = std::thread([slot, &stop, op_us] {
        std::uint32_t x = 0;
        while (!stop.load(std::memory_order_acquire)) {
          if (slot->buffer.pop(x)) {
            detail::spin_until(now_us() + op_us);
            while (!slot->done->push(x)) std::this_thread::yield();
          } else {
            std::this_thread::yield();
          }
        }
      });
    }
    ExecutorBitmap idle(static_cast<std::size_t>(executors));
    idle.set_all();
    int dispatched = 0;
    int completed = 0;
    double t0 = now_us();
    while (completed < total_ops) {
      for (auto& slot : slots) {
        std::uint32_t x = 0;
        while (slot->done->pop(x)) {
          ++completed;
          idle.set(static_cast<std::size_t>(&slot - slots.data()));
        }
      }
      while (dispatched < total_ops) {
        auto e = find_executor(idle);
        if (!e.has_value()) break;
        // an idle executor's buffer is empty, so this never loops
        while (!slots[*e]->buffer.push(static_cast<std::uint32_t>(dispatched)))
          std::this_thread::yield();
        ++dispatched;
        idle.clear(*e);
      }
    }
    double elapsed_us = now_us() - t0;
    stop.store(true, std::memory_order_release);
    for (auto& slot : slots) slot->thread.join();
    result.spsc_ops_per_sec = total_ops / (elapsed_us / 1e6);
  }

  {  // one shared queue behind a mutex
    std::mutex mu;
    std::deque<std::uint32_t> queue;
    for (int i = 0; i < total_ops; ++i) {
      queue.push_back(static_cast<std::uint32_t>(i));
    }
    std::atomic<int> remaining{total_ops};
    std::vector<std::thread> workers;
    double t0 = now_us();
    for (int e = 0; e < executors; ++e) {
      workers.emplace_back([&] {
        for (;;) {
          std::uint32_t x = 0;
          {
            std::lock_guard<std::mutex> lk(mu);
            if (queue.empty()) return;
            x = queue.front();
            queue.pop_front();
          }
          (void)x;
          detail::spin_until(now_us() + op_us);
          remaining.fetch_sub(1, std::memory_order_release);
        }
      });
    }
    for (auto& w : workers) w.join();
    double elapsed_us = now_us() - t0;
    result.shared_ops_per_sec = total_ops / (elapsed_us / 1e6);
  }
  return result;
}

}  // namespace graphi
