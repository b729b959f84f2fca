#pragma once

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace graphi {

inline constexpr std::size_t kCacheLine = 64;

/// Lock-free single-producer single-consumer ring with compile-time capacity.
/// push() on a full ring is rejected, never blocks. Capacity 1 instantiations
/// back the per-executor operation buffers.
template <typename T, std::size_t N>
class SpscRing {
  static_assert(N >= 1 && (N & (N - 1)) == 0, "capacity must be a power of two");

 public:
  [[nodiscard]] bool push(const T& item) noexcept {
    const std::size_t w = write_.load(std::memory_order_relaxed);
    const std::size_t r = read_.load(std::memory_order_acquire);
    if (w - r == N) return false;  // full
    slots_[w & (N - 1)] = item;
    write_.store(w + 1, std::memory_order_release);
    return true;
  }

  [[nodiscard]] bool pop(T& out) noexcept {
    const std::size_t r = read_.load(std::memory_order_relaxed);
    const std::size_t w = write_.load(std::memory_order_acquire);
    if (r == w) return false;  // empty
    out = slots_[r & (N - 1)];
    read_.store(r + 1, std::memory_order_release);
    return true;
  }

  bool empty() const noexcept {
    return read_.load(std::memory_order_acquire) == write_.load(std::memory_order_acquire);
  }

 private:
  alignas(kCacheLine) std::atomic<std::size_t> write_{0};
  alignas(kCacheLine) std::atomic<std::size_t> read_{0};
  alignas(kCacheLine) T slots_[N]{};
};

/// Per-executor operation buffer: the scheduler pushes at most one pending
/// operation id; the owning executor pops it.
using OperationBuffer = SpscRing<std::uint32_t, 1>;

/// SPSC queue with runtime capacity (rounded up to a power of two). Used for
/// the per-executor triggered queues, sized so a full iteration's completions
/// always fit.
template <typename T>
class SpscQueue {
 public:
  explicit SpscQueue(std::size_t min_capacity)
      : mask_(std::bit_ceil(min_capacity < 2 ? std::size_t{2} : min_capacity) - 1),
        slots_(mask_ + 1) {}

  [[nodiscard]] bool push(const T& item) noexcept {
    const std::size_t w = write_.load(std::memory_order_relaxed);
    const std::size_t r = read_.load(std::memory_order_acquire);
    if (w - r == slots_.size()) return false;
    slots_[w & mask_] = item;
    write_.store(w + 1, std::memory_order_release);
    return true;
  }

  [[nodiscard]] bool pop(T& out) noexcept {
    const std::size_t r = read_.load(std::memory_order_relaxed);
    const std::size_t w = write_.load(std::memory_order_acquire);
    if (r == w) return false;
    out = slots_[r & mask_];
    read_.store(r + 1, std::memory_order_release);
    return true;
  }

  std::size_t capacity() const noexcept { return slots_.size(); }

 private:
  std::size_t mask_;
  std::vector<T> slots_;
  alignas(kCacheLine) std::atomic<std::size_t> write_{0};
  alignas(kCacheLine) std::atomic<std::size_t> read_{0};
};

/// Idle mask over executors: bit i set exactly when executor i has an empty
/// operation buffer and no running operation. Only the scheduler thread
/// touches it, so plain words suffice.
class ExecutorBitmap {
 public:
  explicit ExecutorBitmap(std::size_t bits = 0) : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }

  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void clear(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set_all() {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] = ~std::uint64_t{0};
    if (bits_ & 63) words_.back() = (std::uint64_t{1} << (bits_ & 63)) - 1;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  bool all() const {
    std::size_t full = bits_ / 64;
    for (std::size_t i = 0; i < full; ++i)
      if (words_[i] != ~std::uint64_t{0}) return false;
    if (bits_ & 63)
      if (words_.back() != (std::uint64_t{1} << (bits_ & 63)) - 1) return false;
    return true;
  }

 private:
  std::size_t bits_;
  std::vector<std::uint64_t> words_;

  friend std::optional<std::size_t> find_executor(const ExecutorBitmap&);
};

/// Index of the lowest idle executor (trailing-zero scan word by word), or
/// nullopt when every executor is busy.
inline std::optional<std::size_t> find_executor(const ExecutorBitmap& bitmap) {
  for (std::size_t wi = 0; wi < bitmap.words_.size(); ++wi) {
    if (bitmap.words_[wi] != 0)
      return wi * 64 + static_cast<std::size_t>(std::countr_zero(bitmap.words_[wi]));
  }
  return std::nullopt;
}

}  // namespace graphi
