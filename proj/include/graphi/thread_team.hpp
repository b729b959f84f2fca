#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_set>
#include <vector>

#include "graphi/error.hpp"

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

namespace graphi {

enum class PinResult { Ok, Unsupported, InvalidCore };

inline unsigned detected_cores() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Restricts the calling thread to one core. Returns Unsupported on platforms
/// without affinity control; callers fall back to unpinned execution.
inline PinResult pin_thread(int core_id) {
  if (core_id < 0 || static_cast<unsigned>(core_id) >= detected_cores())
    return PinResult::InvalidCore;
#ifdef __linux__
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core_id, &set);
  if (pthread_setaffinity_np(pthread_self(), sizeof(set), &set) != 0)
    return PinResult::Unsupported;
  return PinResult::Ok;
#else
  return PinResult::Unsupported;
#endif
}

inline double now_us() {
  using namespace std::chrono;
  return duration<double, std::micro>(steady_clock::now().time_since_epoch()).count();
}

/// A fixed team of threads running one data-parallel job at a time. The
/// calling thread is member 0; size-1 workers are spawned at construction and
/// reused for every run() (fork-join). Workers wait on a short spin then a
/// condition variable, so oversubscribed hosts stay responsive.
class ThreadTeam {
 public:
  using Job = std::function<void(int member, int team_size)>;

  explicit ThreadTeam(int size, std::vector<int> core_set = {}) : size_(size) {
    if (size < 1) raise(ErrorCode::InvalidArgument, "team size must be >= 1");
    if (!core_set.empty()) {
      if (static_cast<int>(core_set.size()) != size)
        raise(ErrorCode::InvalidArgument, "core_set size must equal team size");
      std::unordered_set<int> uniq(core_set.begin(), core_set.end());
      if (static_cast<int>(uniq.size()) != size)
        raise(ErrorCode::InvalidArgument, "core_set ids must be distinct");
    }
    core_set_ = std::move(core_set);
    workers_.reserve(static_cast<std::size_t>(size - 1));
    for (int member = 1; member < size; ++member)
      workers_.emplace_back([this, member] { worker_loop(member); });
  }

  ThreadTeam(const ThreadTeam&) = delete;
  ThreadTeam& operator=(const ThreadTeam&) = delete;

  ~ThreadTeam() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  int size() const { return size_; }

  /// core_set[0] belongs to member 0 (the caller); the team only pins its own
  /// workers. Callers that want member 0 pinned call pin_thread themselves.
  const std::vector<int>& core_set() const { return core_set_; }

  /// Runs job(member, size) on every member; returns when all are done.
  void run(const Job& job) {
    if (size_ == 1) {
      job(0, 1);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      job_ = &job;
      pending_ = size_ - 1;
      ++generation_;
    }
    cv_.notify_all();
    job(0, size_);
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
  }

 private:
  void worker_loop(int member) {
    if (!core_set_.empty()) pin_thread(core_set_[static_cast<std::size_t>(member)]);
    std::uint64_t seen = 0;
    while (true) {
      const Job* job = nullptr;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        job = job_;
      }
      (*job)(member, size_);
      std::lock_guard<std::mutex> lock(mu_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }

  int size_;
  std::vector<int> core_set_;
  std::vector<std::thread> workers_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const Job* job_ = nullptr;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

/// Splits [0, total) into team-size contiguous chunks; member i gets
/// [begin, end). Chunks cover the range exactly with no overlap.
inline std::pair<std::int64_t, std::int64_t> partition_range(std::int64_t total, int team_size,
                                                             int member) {
  std::int64_t base = total / team_size;
  std::int64_t extra = total % team_size;
  std::int64_t begin = member * base + std::min<std::int64_t>(member, extra);
  std::int64_t len = base + (member < extra ? 1 : 0);
  return {begin, begin + len};
}

}  // namespace graphi
