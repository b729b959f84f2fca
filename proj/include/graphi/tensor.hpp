#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "graphi/error.hpp"

namespace graphi {

/// Dense row-major float32 tensor.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::int64_t> dims) : shape(std::move(dims)) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
      if (d <= 0) raise(ErrorCode::InvalidArgument, "tensor dims must be positive");
      n *= d;
    }
    data.assign(static_cast<std::size_t>(n), 0.0f);
  }

  std::int64_t numel() const {
    return static_cast<std::int64_t>(data.size());
  }

  std::int64_t dim(std::size_t i) const { return shape[i]; }

  float& at2(std::int64_t r, std::int64_t c) { return data[static_cast<std::size_t>(r * shape[1] + c)]; }
  float at2(std::int64_t r, std::int64_t c) const {
    return data[static_cast<std::size_t>(r * shape[1] + c)];
  }

  /// Deterministic pseudo-random fill in [-1, 1); test and engine inputs.
  void fill_random(std::uint64_t seed) {
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 0xbf58476d1ce4e5b9ULL;
    for (auto& v : data) {
      s ^= s >> 30;
      s *= 0xbf58476d1ce4e5b9ULL;
      s ^= s >> 27;
      s *= 0x94d049bb133111ebULL;
      s ^= s >> 31;
      v = static_cast<float>(static_cast<double>(s >> 11) / 9007199254740992.0) * 2.0f - 1.0f;
    }
  }
};

inline Tensor make_matrix(std::int64_t rows, std::int64_t cols) {
  return Tensor({rows, cols});
}

inline Tensor make_vector(std::int64_t len) { return Tensor({len}); }

}  // namespace graphi
