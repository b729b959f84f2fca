#pragma once

// Synthetic computation graphs for tests and experiments. The generators
// reproduce the dependence skeleton and op granularity of the real models,
// not their numerics: an LSTM cell is 2 matmuls feeding a chain of 3
// elementwise ops, convolutions are matmul surrogates of comparable size.
// Generation is pure and deterministic in the parameters and seed.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "graphi/error.hpp"
#include "graphi/graph.hpp"

namespace graphi {

enum class Model { Lstm, PhasedLstm, PathNet, Inception, Random, Diamond };
enum class SizePreset { Small, Medium, Large };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::Lstm: return "lstm";
    case Model::PhasedLstm: return "plstm";
    case Model::PathNet: return "pathnet";
    case Model::Inception: return "inception";
    case Model::Random: return "random";
    case Model::Diamond: return "diamond";
  }
  return "?";
}

inline Model parse_model(const std::string& s) {
  if (s == "lstm") return Model::Lstm;
  if (s == "plstm") return Model::PhasedLstm;
  if (s == "pathnet") return Model::PathNet;
  if (s == "inception") return Model::Inception;
  if (s == "random") return Model::Random;
  if (s == "diamond") return Model::Diamond;
  raise(ErrorCode::InvalidArgument, "unknown model '" + s + "'");
}

inline const char* to_string(SizePreset s) {
  switch (s) {
    case SizePreset::Small: return "small";
    case SizePreset::Medium: return "medium";
    case SizePreset::Large: return "large";
  }
  return "?";
}

inline SizePreset parse_size(const std::string& s) {
  if (s == "small") return SizePreset::Small;
  if (s == "medium") return SizePreset::Medium;
  if (s == "large") return SizePreset::Large;
  raise(ErrorCode::InvalidArgument, "unknown size '" + s + "'");
}

namespace detail {

class GraphBuilder {
 public:
  std::int64_t add(std::string name, OpKindSpec kind, bool small = false) {
    std::int64_t id = static_cast<std::int64_t>(ops_.size());
    ops_.push_back({id, std::move(name), std::move(kind), small});
    return id;
  }

  void link(std::int64_t src, std::int64_t dst) { edges_.push_back({src, dst}); }

  void link_all(const std::vector<std::int64_t>& srcs, std::int64_t dst) {
    for (std::int64_t s : srcs) link(s, dst);
  }

  ComputationGraph build() { return build_graph(std::move(ops_), std::move(edges_)); }

 private:
  std::vector<OperationSpec> ops_;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges_;
};

inline void require_positive(std::int64_t v, const char* what) {
  if (v < 1) {
    raise(ErrorCode::InvalidArgument, std::string(what) + " must be >= 1");
  }
}

// 53-bit uniform draw in [0, 1); identical on every platform, unlike the
// standard distributions.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Recurrent grid. A cell (l, t) is 2 MatMul(batch, neurons, 4*neurons) ops
/// feeding a chain of 3 Elementwise ops of length batch*neurons; its entry
/// matmuls wait on the outputs of cells (l-1, t) and (l, t-1), and a small
/// scalar bootstrap op per layer stands in for the initial hidden state. The
/// phased variant appends one extra chain of 3 quarter-length elementwise
/// ops per cell. With train, a mirrored gradient grid follows: cell (l, t)
/// doubled to 4 matmuls and 6 elementwise ops, depending on (l+1, t),
/// (l, t+1) and on its forward twin.
inline ComputationGraph gen_lstm(int layers, int steps, int neurons, int batch,
                                 bool train = false, bool phased = false) {
  detail::require_positive(layers, "layers");
  detail::require_positive(steps, "steps");
  detail::require_positive(neurons, "neurons");
  detail::require_positive(batch, "batch");
  detail::GraphBuilder b;
  const std::int64_t len = static_cast<std::int64_t>(batch) * neurons;
  const std::int64_t phased_len = std::max<std::int64_t>(1, len / 4);

  auto tag = [](const char* prefix, int l, int t) {
    return std::string(prefix) + ".l" + std::to_string(l) + ".t" +
           std::to_string(t);
  };

  // fwd_out[l][t]: the op dependents wait on
  std::vector<std::vector<std::int64_t>> fwd_out(
      static_cast<std::size_t>(layers),
      std::vector<std::int64_t>(static_cast<std::size_t>(steps), -1));
  std::vector<std::int64_t> boot(static_cast<std::size_t>(layers), -1);
  for (int l = 0; l < layers; ++l) {
    boot[static_cast<std::size_t>(l)] =
        b.add("lstm.l" + std::to_string(l) + ".h0", SyntheticOp{1.0}, true);
  }
  const EwKind chain_kind[3] = {EwKind::Add, EwKind::Sigmoid, EwKind::Mul};
  for (int t = 0; t < steps; ++t) {
    for (int l = 0; l < layers; ++l) {
      std::vector<std::int64_t> deps;
      if (l > 0) deps.push_back(fwd_out[static_cast<std::size_t>(l - 1)]
                                       [static_cast<std::size_t>(t)]);
      if (t > 0) deps.push_back(fwd_out[static_cast<std::size_t>(l)]
                                       [static_cast<std::size_t>(t - 1)]);
      if (t == 0) deps.push_back(boot[static_cast<std::size_t>(l)]);
      std::int64_t mx = b.add(tag("lstm", l, t) + ".mm_x",
                              MatMulOp{batch, neurons, 4 * neurons});
      std::int64_t mh = b.add(tag("lstm", l, t) + ".mm_h",
                              MatMulOp{batch, neurons, 4 * neurons});
      b.link_all(deps, mx);
      b.link_all(deps, mh);
      std::int64_t prev = -1;
      for (int k = 0; k < 3; ++k) {
        std::int64_t ew = b.add(tag("lstm", l, t) + ".ew" + std::to_string(k),
                                ElementwiseOp{chain_kind[k], len});
        if (k == 0) {
          b.link(mx, ew);
          b.link(mh, ew);
        } else {
          b.link(prev, ew);
        }
        prev = ew;
      }
      if (phased) {
        for (int k = 0; k < 3; ++k) {
          std::int64_t ew =
              b.add(tag("lstm", l, t) + ".gate" + std::to_string(k),
                    ElementwiseOp{chain_kind[k], phased_len});
          b.link(prev, ew);
          prev = ew;
        }
      }
      fwd_out[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] = prev;
    }
  }

  if (train) {
    std::vector<std::vector<std::int64_t>> bwd_out(
        static_cast<std::size_t>(layers),
        std::vector<std::int64_t>(static_cast<std::size_t>(steps), -1));
    for (int t = steps - 1; t >= 0; --t) {
      for (int l = layers - 1; l >= 0; --l) {
        std::vector<std::int64_t> deps;
        deps.push_back(
            fwd_out[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)]);
        if (l + 1 < layers) {
          deps.push_back(bwd_out[static_cast<std::size_t>(l + 1)]
                                [static_cast<std::size_t>(t)]);
        }
        if (t + 1 < steps) {
          deps.push_back(bwd_out[static_cast<std::size_t>(l)]
                                [static_cast<std::size_t>(t + 1)]);
        }
        std::vector<std::int64_t> entry;
        for (int k = 0; k < 4; ++k) {
          std::int64_t mm = b.add(tag("grad", l, t) + ".mm" + std::to_string(k),
                                  MatMulOp{batch, neurons, 4 * neurons});
          b.link_all(deps, mm);
          entry.push_back(mm);
        }
        std::int64_t prev = -1;
        for (int k = 0; k < 6; ++k) {
          std::int64_t ew =
              b.add(tag("grad", l, t) + ".ew" + std::to_string(k),
                    ElementwiseOp{chain_kind[k % 3], len});
          if (k == 0) {
            b.link_all(entry, ew);
          } else {
            b.link(prev, ew);
          }
          prev = ew;
        }
        bwd_out[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] =
            prev;
      }
    }
  }
  return b.build();
}

/// layers x modules grid: modules within a layer are mutually independent
/// chains (matmul surrogate, relu, pooling mul); each layer ends in an
/// aggregation op that the next layer's modules wait on.
inline ComputationGraph gen_pathnet(int layers, int modules_per_layer,
                                    int image, int neurons) {
  detail::require_positive(layers, "layers");
  detail::require_positive(modules_per_layer, "modules_per_layer");
  detail::require_positive(image, "image");
  detail::require_positive(neurons, "neurons");
  detail::GraphBuilder b;
  const std::int64_t len = static_cast<std::int64_t>(image) * neurons;
  std::int64_t prev_agg = -1;
  for (int l = 0; l < layers; ++l) {
    std::vector<std::int64_t> outs;
    for (int m = 0; m < modules_per_layer; ++m) {
      std::string base =
          "path.l" + std::to_string(l) + ".m" + std::to_string(m);
      std::int64_t mm = b.add(base + ".mm", MatMulOp{image, image, neurons});
      std::int64_t relu =
          b.add(base + ".relu", ElementwiseOp{EwKind::Relu, len});
      std::int64_t pool = b.add(base + ".pool", ElementwiseOp{EwKind::Mul, len});
      b.link(mm, relu);
      b.link(relu, pool);
      if (prev_agg >= 0) b.link(prev_agg, mm);
      outs.push_back(pool);
    }
    std::int64_t agg = b.add("path.l" + std::to_string(l) + ".agg",
                             ElementwiseOp{EwKind::Add, len});
    b.link_all(outs, agg);
    prev_agg = agg;
  }
  return b.build();
}

/// Serial chain of blocks; each block fans out from the previous block's
/// concat (or the stem) into `branches` parallel matmul+relu chains that a
/// concat surrogate re-merges. The width multiplier scales the matmul's
/// output dimension.
inline ComputationGraph gen_inception(int blocks, int branches, int width,
                                      int image = 128) {
  detail::require_positive(blocks, "blocks");
  detail::require_positive(width, "width");
  detail::require_positive(image, "image");
  if (branches < 2 || branches > 3) {
    raise(ErrorCode::InvalidArgument, "branches must be 2 or 3");
  }
  detail::GraphBuilder b;
  const int out_dim = 32 * width;
  const std::int64_t len = static_cast<std::int64_t>(image) * out_dim;
  std::int64_t prev = b.add("incep.stem", MatMulOp{image, image, out_dim});
  for (int blk = 0; blk < blocks; ++blk) {
    std::string base = "incep.b" + std::to_string(blk);
    std::vector<std::int64_t> outs;
    for (int br = 0; br < branches; ++br) {
      std::int64_t mm = b.add(base + ".br" + std::to_string(br) + ".mm",
                              MatMulOp{image, image, out_dim});
      std::int64_t relu = b.add(base + ".br" + std::to_string(br) + ".relu",
                                ElementwiseOp{EwKind::Relu, len});
      b.link(prev, mm);
      b.link(mm, relu);
      outs.push_back(relu);
    }
    std::int64_t concat =
        b.add(base + ".concat", ElementwiseOp{EwKind::Add, len});
    b.link_all(outs, concat);
    prev = concat;
  }
  return b.build();
}

/// Random DAG of synthetic ops: edge (i, j) for i < j is present with
/// probability edge_prob, durations are uniform in duration_range (us).
/// Fully determined by the seed.
inline std::pair<ComputationGraph, DurationTable> gen_random_dag(
    int n, double edge_prob, std::pair<double, double> duration_range,
    std::uint64_t seed) {
  detail::require_positive(n, "n");
  if (edge_prob < 0.0 || edge_prob > 1.0) {
    raise(ErrorCode::InvalidArgument, "edge_prob must be in [0, 1]");
  }
  if (duration_range.first < 0.0 ||
      duration_range.second < duration_range.first) {
    raise(ErrorCode::InvalidArgument, "invalid duration range");
  }
  std::mt19937_64 rng(seed);
  detail::GraphBuilder b;
  DurationTable durations;
  for (int i = 0; i < n; ++i) {
    double us = duration_range.first +
                detail::uniform01(rng) *
                    (duration_range.second - duration_range.first);
    b.add("r" + std::to_string(i), SyntheticOp{us});
    durations.set(i, us);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (detail::uniform01(rng) < edge_prob) b.link(i, j);
    }
  }
  return {b.build(), std::move(durations)};
}

/// A(2u) -> {B(3u), C(1u)} -> D(2u): the smallest graph where dispatch order
/// matters. unit_us scales the synthetic durations.
inline ComputationGraph gen_diamond(double unit_us = 1000.0) {
  if (unit_us <= 0.0) {
    raise(ErrorCode::InvalidArgument, "unit_us must be positive");
  }
  detail::GraphBuilder b;
  std::int64_t a = b.add("A", SyntheticOp{2.0 * unit_us});
  std::int64_t bb = b.add("B", SyntheticOp{3.0 * unit_us});
  std::int64_t c = b.add("C", SyntheticOp{1.0 * unit_us});
  std::int64_t d = b.add("D", SyntheticOp{2.0 * unit_us});
  b.link(a, bb);
  b.link(a, c);
  b.link(bb, d);
  b.link(c, d);
  return b.build();
}

/// Durations declared in the graph itself; defined only when every op is
/// synthetic.
inline DurationTable declared_durations(const ComputationGraph& graph) {
  DurationTable out;
  for (const auto& op : graph.ops()) {
    const auto* syn = std::get_if<SyntheticOp>(&op.kind);
    if (syn == nullptr) {
      raise(ErrorCode::MissingDuration,
            "op " + std::to_string(op.id) + " has no declared duration",
            {op.id});
    }
    out.set(op.id, syn->us);
  }
  return out;
}

struct ModelParams {
  Model model = Model::Lstm;
  SizePreset size = SizePreset::Small;
  bool train = false;
  std::uint64_t seed = 1;
  // overrides; 0 (or negative bounds) means "use the preset"
  int layers = 0;
  int steps = 0;
  int modules = 0;
  int branches = 0;
  int blocks = 0;
  int neurons = 0;
  int image = 0;
  int width = 0;
  int batch = 0;
  int n = 0;
  double edge_prob = -1.0;
  double dur_lo = -1.0;
  double dur_hi = -1.0;
};

struct Generated {
  ComputationGraph graph;
  std::optional<DurationTable> durations;  // only when the model declares them
};

/// Applies the size presets, then any overrides, and dispatches to the
/// matching generator.
inline Generated generate(const ModelParams& params) {
  auto pick = [](int override_v, int preset_v) {
    return override_v > 0 ? override_v : preset_v;
  };
  switch (params.model) {
    case Model::Lstm:
    case Model::PhasedLstm: {
      int steps = 20, neurons = 128;
      if (params.size == SizePreset::Medium) steps = 30, neurons = 512;
      if (params.size == SizePreset::Large) steps = 40, neurons = 1024;
      return {gen_lstm(pick(params.layers, 4), pick(params.steps, steps),
                       pick(params.neurons, neurons), pick(params.batch, 64),
                       params.train, params.model == Model::PhasedLstm),
              std::nullopt};
    }
    case Model::PathNet: {
      int image = 32, neurons = 16;
      if (params.size == SizePreset::Medium) image = 48, neurons = 32;
      if (params.size == SizePreset::Large) image = 64, neurons = 48;
      return {gen_pathnet(pick(params.layers, 3), pick(params.modules, 6),
                          pick(params.image, image),
                          pick(params.neurons, neurons)),
              std::nullopt};
    }
    case Model::Inception: {
      int image = 128, width = 1;
      if (params.size == SizePreset::Medium) image = 192, width = 2;
      if (params.size == SizePreset::Large) image = 256, width = 4;
      return {gen_inception(pick(params.blocks, 9), pick(params.branches, 3),
                            pick(params.width, width),
                            pick(params.image, image)),
              std::nullopt};
    }
    case Model::Random: {
      int n = 20;
      if (params.size == SizePreset::Medium) n = 60;
      if (params.size == SizePreset::Large) n = 120;
      double lo = params.dur_lo >= 0.0 ? params.dur_lo : 50.0;
      double hi = params.dur_hi >= 0.0 ? params.dur_hi : 500.0;
      double p = params.edge_prob >= 0.0 ? params.edge_prob : 0.15;
      auto [graph, durations] =
          gen_random_dag(pick(params.n, n), p, {lo, hi}, params.seed);
      return {std::move(graph), std::move(durations)};
    }
    case Model::Diamond: {
      ComputationGraph g = gen_diamond();
      DurationTable d = declared_durations(g);
      return {std::move(g), std::move(d)};
    }
  }
  raise(ErrorCode::InvalidArgument, "unreachable");
}

}  // namespace graphi
