#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "graphi/error.hpp"
#include "graphi/graph.hpp"
#include "graphi/tensor.hpp"
#include "graphi/thread_team.hpp"

namespace graphi {

// ---------------------------------------------------------------------------
// Matrix multiply
// ---------------------------------------------------------------------------

/// Single-threaded triple-loop ground truth. Never optimized.
inline Tensor reference_matmul(const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0])
    raise(ErrorCode::ShapeMismatch, "matmul needs [m,k] x [k,n]");
  const std::int64_t m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor c({m, n});
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (std::int64_t l = 0; l < k; ++l) acc += a.at2(i, l) * b.at2(l, j);
      c.at2(i, j) = acc;
    }
  return c;
}

/// Row-blocked multiply into a preallocated output. Each team member computes
/// a contiguous block of output rows with an i-k-j loop; the per-element
/// accumulation order matches reference_matmul, so results are independent of
/// team size.
inline void matmul_into(const Tensor& a, const Tensor& b, Tensor& c, ThreadTeam& team) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0])
    raise(ErrorCode::ShapeMismatch, "matmul needs [m,k] x [k,n]");
  const std::int64_t m = a.shape[0], k = a.shape[1], n = b.shape[1];
  if (c.shape.size() != 2 || c.shape[0] != m || c.shape[1] != n)
    raise(ErrorCode::ShapeMismatch, "matmul output must be [m,n]");

  team.run([&](int member, int team_size) {
    auto [row_begin, row_end] = partition_range(m, team_size, member);
    const float* pa = a.data.data();
    const float* pb = b.data.data();
    float* pc = c.data.data();
    for (std::int64_t i = row_begin; i < row_end; ++i) {
      float* crow = pc + i * n;
      for (std::int64_t j = 0; j < n; ++j) crow[j] = 0.0f;
      for (std::int64_t l = 0; l < k; ++l) {
        const float av = pa[i * k + l];
        const float* brow = pb + l * n;
        for (std::int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  });
}

inline Tensor matmul(const Tensor& a, const Tensor& b, ThreadTeam& team) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0])
    raise(ErrorCode::ShapeMismatch, "matmul needs [m,k] x [k,n]");
  Tensor c({a.shape[0], b.shape[1]});
  matmul_into(a, b, c, team);
  return c;
}

// ---------------------------------------------------------------------------
// Element-wise ops
// ---------------------------------------------------------------------------

inline void elementwise_into(EwKind op, const Tensor& x, const Tensor* y, Tensor& out,
                             ThreadTeam& team) {
  if (is_binary(op)) {
    if (y == nullptr) raise(ErrorCode::ArityMismatch, "binary elementwise op needs two inputs");
    if (y->shape != x.shape)
      raise(ErrorCode::ShapeMismatch, "binary elementwise inputs must have equal shapes");
  } else if (y != nullptr) {
    raise(ErrorCode::ArityMismatch, "unary elementwise op takes one input");
  }
  if (out.shape != x.shape)
    raise(ErrorCode::ShapeMismatch, "elementwise output must match input shape");

  const std::int64_t total = x.numel();
  team.run([&](int member, int team_size) {
    auto [begin, end] = partition_range(total, team_size, member);
    const float* px = x.data.data();
    const float* py = y ? y->data.data() : nullptr;
    float* po = out.data.data();
    switch (op) {
      case EwKind::Add:
        for (std::int64_t i = begin; i < end; ++i) po[i] = px[i] + py[i];
        break;
      case EwKind::Mul:
        for (std::int64_t i = begin; i < end; ++i) po[i] = px[i] * py[i];
        break;
      case EwKind::Sigmoid:
        for (std::int64_t i = begin; i < end; ++i) po[i] = 1.0f / (1.0f + std::exp(-px[i]));
        break;
      case EwKind::Tanh:
        for (std::int64_t i = begin; i < end; ++i) po[i] = std::tanh(px[i]);
        break;
      case EwKind::Relu:
        for (std::int64_t i = begin; i < end; ++i) po[i] = px[i] > 0.0f ? px[i] : 0.0f;
        break;
      default:
        raise(ErrorCode::UnknownOp, "unknown elementwise op");
    }
  });
}

inline Tensor elementwise(EwKind op, const Tensor& x, const Tensor* y, ThreadTeam& team) {
  Tensor out(x.shape);
  elementwise_into(op, x, y, out, team);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic delay
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t spin_mix(std::uint64_t x, int iters) {
  for (int i = 0; i < iters; ++i) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 29;
  }
  return x;
}

// Iterations of spin_mix per microsecond, calibrated once per process.
inline int spin_iters_per_us() {
  static std::atomic<int> cached{0};
  int v = cached.load(std::memory_order_relaxed);
  if (v != 0) return v;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  v = cached.load(std::memory_order_relaxed);
  if (v != 0) return v;
  volatile std::uint64_t sink = 0;
  const int probe = 200000;
  double t0 = now_us();
  sink = spin_mix(sink + 1, probe);
  double elapsed = now_us() - t0;
  v = elapsed > 0.0 ? static_cast<int>(probe / elapsed) : probe;
  if (v < 1) v = 1;
  cached.store(v, std::memory_order_relaxed);
  return v;
}

// Busy-waits until `deadline_us` (now_us() scale), doing calibrated chunks of
// arithmetic between clock checks so the core stays genuinely busy.
inline void spin_until(double deadline_us) {
  const int chunk = spin_iters_per_us();
  volatile std::uint64_t sink = 0x2545f4914f6cdd1dULL;
  while (now_us() < deadline_us) sink = spin_mix(sink, chunk);
}

}  // namespace detail

/// Occupies every thread of the team with busy work for ~`duration_us`
/// wall-clock microseconds. Not a sleep: cores stay busy as a real kernel
/// would. Duration does not depend on team size.
inline void synthetic_delay(double duration_us, ThreadTeam& team) {
  if (duration_us < 0.0) raise(ErrorCode::InvalidArgument, "duration must be >= 0");
  if (duration_us == 0.0) return;
  detail::spin_iters_per_us();  // calibrate outside the timed region
  const double deadline = now_us() + duration_us;
  team.run([&](int, int) { detail::spin_until(deadline); });
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

struct ExecResult {
  std::vector<Tensor> outputs;
  double duration_us = 0.0;
};

/// Runs one operation spec with the team, allocating outputs. Inputs must
/// match the kind: matmul {a, b}, binary elementwise {x, y}, unary {x},
/// synthetic {}.
inline ExecResult execute_operation(const OperationSpec& spec,
                                    const std::vector<const Tensor*>& inputs,
                                    ThreadTeam& team) {
  ExecResult result;
  const double t0 = now_us();
  if (const auto* mm = std::get_if<MatMulOp>(&spec.kind)) {
    if (inputs.size() != 2)
      raise(ErrorCode::ArityMismatch, "matmul takes 2 inputs, got " +
                                          std::to_string(inputs.size()));
    if (inputs[0]->shape != std::vector<std::int64_t>{mm->m, mm->k} ||
        inputs[1]->shape != std::vector<std::int64_t>{mm->k, mm->n})
      raise(ErrorCode::ShapeMismatch, "inputs do not match matmul spec dims");
    result.outputs.push_back(matmul(*inputs[0], *inputs[1], team));
  } else if (const auto* ew = std::get_if<ElementwiseOp>(&spec.kind)) {
    const std::size_t arity = is_binary(ew->op) ? 2 : 1;
    if (inputs.size() != arity)
      raise(ErrorCode::ArityMismatch, "elementwise op takes " + std::to_string(arity) +
                                          " inputs, got " + std::to_string(inputs.size()));
    if (inputs[0]->numel() != ew->len)
      raise(ErrorCode::ShapeMismatch, "input length does not match elementwise spec");
    result.outputs.push_back(
        elementwise(ew->op, *inputs[0], arity == 2 ? inputs[1] : nullptr, team));
  } else {
    if (!inputs.empty())
      raise(ErrorCode::ArityMismatch, "synthetic op takes no inputs");
    synthetic_delay(std::get<SyntheticOp>(spec.kind).us, team);
  }
  result.duration_us = now_us() - t0;
  return result;
}

}  // namespace graphi
