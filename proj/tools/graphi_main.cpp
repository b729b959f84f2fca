// Command-line front end: generate graphs, profile them, run them on the
// engine, replay policies in the simulator, and benchmark the kernels and
// dispatch channels. Logs go to stderr; file outputs and CSV go where asked.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphi/graphi.hpp"

namespace {

using graphi::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    graphi::raise(graphi::ErrorCode::Io, "cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    graphi::raise(graphi::ErrorCode::Io, "cannot write '" + path + "'");
  }
  out << content;
  if (!out) {
    graphi::raise(graphi::ErrorCode::Io, "write to '" + path + "' failed");
  }
}

graphi::ComputationGraph load_graph(const std::string& path) {
  return graphi::parse_graph(read_file(path));
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      graphi::raise(graphi::ErrorCode::InvalidArgument,
                    std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) {
    graphi::raise(graphi::ErrorCode::InvalidArgument,
                  std::string(what) + " list is empty");
  }
  return out;
}

graphi::ExecutionConfig parse_extra_config(const std::string& s,
                                           const graphi::ExecutionConfig& base) {
  auto sep = s.find('x');
  graphi::ExecutionConfig cfg = base;
  try {
    if (sep == std::string::npos) throw std::invalid_argument(s);
    cfg.num_executors = std::stoi(s.substr(0, sep));
    cfg.threads_per_executor = std::stoi(s.substr(sep + 1));
  } catch (const std::exception&) {
    graphi::raise(graphi::ErrorCode::InvalidArgument,
                  "bad config '" + s + "', expected KxT");
  }
  return cfg;
}

struct GenArgs {
  std::string model = "lstm";
  std::string size = "small";
  std::string out;
  bool train = false;
  std::uint64_t seed = 1;
  int layers = 0, steps = 0, modules = 0, branches = 0, blocks = 0;
  int neurons = 0, image = 0, width = 0, batch = 0, n = 0;
  double edge_prob = -1.0, dur_lo = -1.0, dur_hi = -1.0;
};

int cmd_gen(const GenArgs& args) {
  graphi::ModelParams params;
  params.model = graphi::parse_model(args.model);
  params.size = graphi::parse_size(args.size);
  params.train = args.train;
  params.seed = args.seed;
  params.layers = args.layers;
  params.steps = args.steps;
  params.modules = args.modules;
  params.branches = args.branches;
  params.blocks = args.blocks;
  params.neurons = args.neurons;
  params.image = args.image;
  params.width = args.width;
  params.batch = args.batch;
  params.n = args.n;
  params.edge_prob = args.edge_prob;
  params.dur_lo = args.dur_lo;
  params.dur_hi = args.dur_hi;
  graphi::Generated gen = graphi::generate(params);
  std::string text = graphi::serialize_graph(gen.graph);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text);
    std::cerr << "wrote " << gen.graph.num_ops() << " ops, "
              << gen.graph.edges().size() << " edges to " << args.out << "\n";
  }
  return 0;
}

struct ProfileArgs {
  std::string graph;
  std::string out;
  int cores = 0;
  int tile_size = 2;
  std::string pin = "none";
  std::vector<std::string> extra;
  int warmup = 2;
  int measure = 5;
};

int cmd_profile(const ProfileArgs& args) {
  graphi::ComputationGraph graph = load_graph(args.graph);
  int cores = args.cores > 0 ? args.cores : graphi::detected_cores();
  graphi::PinMode pin = graphi::parse_pin_mode(args.pin);
  std::vector<graphi::ExecutionConfig> configs =
      graphi::enumerate_configs(cores, args.tile_size, pin);
  for (const std::string& s : args.extra) {
    configs.push_back(parse_extra_config(s, configs.front()));
  }
  graphi::Profile profile =
      graphi::profile_graph(graph, configs, args.warmup, args.measure);
  std::cerr << "config  makespan_us\n";
  for (const auto& [cfg, us] : profile.makespans) {
    std::cerr << graphi::config_label(cfg) << "  " << us
              << (graphi::config_label(cfg) ==
                          graphi::config_label(profile.chosen)
                      ? "  <- chosen"
                      : "")
              << "\n";
  }
  std::string text = graphi::profile_to_json(profile).dump(2);
  text.push_back('\n');
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text);
    std::cerr << "wrote profile to " << args.out << "\n";
  }
  return 0;
}

struct RunArgs {
  std::string graph;
  std::string profile;
  std::string trace;
  int executors = 0;
  int threads_per_executor = 0;
  std::string policy = "cpf";
  int iters = 10;
  std::string pin = "none";
  int tile_size = 2;
};

int cmd_run(const RunArgs& args) {
  graphi::ComputationGraph graph = load_graph(args.graph);
  graphi::ExecutionConfig config;
  std::optional<graphi::DurationTable> durations;
  std::optional<graphi::LevelTable> levels;
  if (!args.profile.empty()) {
    graphi::Profile profile =
        graphi::profile_from_json(json::parse(read_file(args.profile)));
    config = profile.chosen;
    durations = std::move(profile.durations);
    levels = std::move(profile.levels);
  }
  if (args.executors > 0) config.num_executors = args.executors;
  if (args.threads_per_executor > 0) {
    config.threads_per_executor = args.threads_per_executor;
  }
  config.policy = graphi::parse_policy(args.policy);
  config.pinning = graphi::parse_pin_mode(args.pin);
  config.tile_size = args.tile_size;
  bool needs_levels = config.policy == graphi::SchedulePolicy::Cpf ||
                      config.policy == graphi::SchedulePolicy::PreferredExecutor;
  if (needs_levels && !levels.has_value()) {
    // synthetic-only graphs declare their own durations
    durations = graphi::declared_durations(graph);  // raises MissingDuration
    levels = graphi::compute_levels(graph, *durations);
  }
  auto engine = graphi::start_engine(
      graph, config, levels.has_value() ? &*levels : nullptr,
      durations.has_value() ? &*durations : nullptr);
  std::vector<double> makespans;
  graphi::Trace last;
  for (int i = 0; i < args.iters; ++i) {
    last = engine->run_iteration();
    makespans.push_back(last.makespan_us());
  }
  engine->shutdown();
  if (!engine->pinning_note().empty()) {
    std::cerr << "note: " << engine->pinning_note() << "\n";
  }
  std::cout << "graph: " << args.graph << " (" << graph.num_ops() << " ops, "
            << graph.edges().size() << " edges)\n";
  std::cout << "config: " << graphi::config_label(config)
            << " pinning=" << graphi::to_string(config.pinning)
            << " policy=" << graphi::to_string(config.policy) << "\n";
  std::cout << "makespans_us:";
  for (double us : makespans) std::cout << ' ' << us;
  std::cout << "\n";
  std::vector<double> sorted = makespans;
  std::sort(sorted.begin(), sorted.end());
  double mean = 0.0;
  for (double us : makespans) mean += us;
  mean /= static_cast<double>(makespans.size());
  double median = sorted.size() % 2 == 1
                      ? sorted[sorted.size() / 2]
                      : 0.5 * (sorted[sorted.size() / 2 - 1] +
                               sorted[sorted.size() / 2]);
  std::cout << "mean_us: " << mean << " median_us: " << median
            << " min_us: " << sorted.front() << "\n";
  if (!args.trace.empty()) {
    std::string text = graphi::trace_to_chrome_json(last.events, graph).dump(2);
    text.push_back('\n');
    write_file(args.trace, text);
    std::cout << "trace: " << args.trace << "\n";
  }
  return 0;
}

struct SimulateArgs {
  std::string graph;
  std::string profile;
  std::string m_list = "1,2,4,8";
  std::string policies = "cpf,fifo,lifo,preferred-executor";
};

int cmd_simulate(const SimulateArgs& args) {
  graphi::ComputationGraph graph = load_graph(args.graph);
  graphi::DurationTable durations;
  if (!args.profile.empty()) {
    graphi::Profile profile =
        graphi::profile_from_json(json::parse(read_file(args.profile)));
    durations = std::move(profile.durations);
  } else {
    durations = graphi::declared_durations(graph);
  }
  graphi::LevelTable levels = graphi::compute_levels(graph, durations);
  std::vector<int> ms = parse_int_list(args.m_list, "m");
  std::vector<graphi::SchedulePolicy> policies;
  {
    std::stringstream ss(args.policies);
    std::string item;
    while (std::getline(ss, item, ',')) {
      policies.push_back(graphi::parse_policy(item));
    }
  }
  double cp = graphi::critical_path_length(graph, durations);
  double work = graphi::total_work(graph, durations);
  std::cout << "graph: " << args.graph << " (" << graph.num_ops() << " ops)\n";
  std::cout << "critical_path_us: " << cp << " total_work_us: " << work
            << "\n";
  for (int m : ms) {
    std::cout << "m=" << m;
    double cpf_us = 0.0;
    for (graphi::SchedulePolicy policy : policies) {
      double us =
          graphi::simulate(graph, durations, &levels, m, policy).makespan_us;
      if (policy == graphi::SchedulePolicy::Cpf) cpf_us = us;
      std::cout << ' ' << graphi::to_string(policy) << '=' << us;
    }
    std::cout << " lower_bound=" << std::max(cp, work / m);
    try {
      std::cout << " optimal=" << graphi::optimal_makespan(graph, durations, m);
    } catch (const graphi::Error& e) {
      if (e.code() != graphi::ErrorCode::TooLarge) throw;
      std::cout << " optimal=n/a";
    }
    if (cpf_us > 0.0) std::cout << " fifo/cpf="
                                << graphi::simulate(graph, durations, &levels,
                                                    m, graphi::SchedulePolicy::Fifo)
                                           .makespan_us /
                                       cpf_us;
    std::cout << "\n";
  }
  return 0;
}

struct BenchArgs {
  std::string kernel = "matmul";
  std::string teams = "1,2,4,8";
  std::string mode = "unpinned";
  int executors = 8;
  double op_us = 10.0;
  int ops = 2000;
  std::string out;
};

int cmd_bench(const BenchArgs& args) {
  std::vector<graphi::BenchRow> rows;
  if (args.mode == "shared-queue-contention") {
    graphi::ContentionResult r =
        graphi::bench_contention(args.executors, args.op_us, args.ops);
    rows.push_back({"contention-spsc", args.executors, 1, false,
                    r.spsc_ops_per_sec, "ops/s"});
    rows.push_back({"contention-shared", args.executors, 1, false,
                    r.shared_ops_per_sec, "ops/s"});
  } else if (args.mode == "pinned" || args.mode == "unpinned") {
    bool pinned = args.mode == "pinned";
    for (int t : parse_int_list(args.teams, "teams")) {
      if (args.kernel == "matmul") {
        rows.push_back(graphi::bench_matmul(t, pinned));
      } else if (args.kernel == "elementwise") {
        rows.push_back(graphi::bench_elementwise(t, pinned));
      } else {
        graphi::raise(graphi::ErrorCode::InvalidArgument,
                      "unknown kernel '" + args.kernel + "'");
      }
    }
  } else {
    graphi::raise(graphi::ErrorCode::InvalidArgument,
                  "unknown mode '" + args.mode + "'");
  }
  std::string csv = graphi::bench_csv(rows);
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    write_file(args.out, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphi: parallel execution engine for computation graphs"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* sub_gen = app.add_subcommand("gen", "generate a graph file");
  sub_gen->add_option("--model", gen.model,
                      "lstm|plstm|pathnet|inception|random|diamond");
  sub_gen->add_option("--size", gen.size, "small|medium|large");
  sub_gen->add_option("--out", gen.out, "output path (default stdout)");
  sub_gen->add_flag("--train", gen.train, "add the backward grid (lstm)");
  sub_gen->add_option("--seed", gen.seed, "generation seed");
  sub_gen->add_option("--layers", gen.layers, "override layers");
  sub_gen->add_option("--steps", gen.steps, "override time steps");
  sub_gen->add_option("--modules", gen.modules, "override modules per layer");
  sub_gen->add_option("--branches", gen.branches, "override branches");
  sub_gen->add_option("--blocks", gen.blocks, "override blocks");
  sub_gen->add_option("--neurons", gen.neurons, "override hidden dim");
  sub_gen->add_option("--image", gen.image, "override image dim");
  sub_gen->add_option("--width", gen.width, "override width multiplier");
  sub_gen->add_option("--batch", gen.batch, "override batch");
  sub_gen->add_option("--n", gen.n, "override random DAG size");
  sub_gen->add_option("--edge-prob", gen.edge_prob, "random DAG edge prob");
  sub_gen->add_option("--dur-lo", gen.dur_lo, "random DAG min duration us");
  sub_gen->add_option("--dur-hi", gen.dur_hi, "random DAG max duration us");

  ProfileArgs prof;
  CLI::App* sub_prof = app.add_subcommand("profile", "find the best config");
  sub_prof->add_option("--graph", prof.graph, "graph JSON path")->required();
  sub_prof->add_option("--out", prof.out, "profile JSON path (default stdout)");
  sub_prof->add_option("--cores", prof.cores, "usable cores (default detected)");
  sub_prof->add_option("--tile-size", prof.tile_size, "cores per tile");
  sub_prof->add_option("--pin", prof.pin, "none|compact-tiles");
  sub_prof->add_option("--config", prof.extra, "extra KxT candidates");
  sub_prof->add_option("--warmup", prof.warmup, "warmup iterations");
  sub_prof->add_option("--measure", prof.measure, "measured iterations");

  RunArgs run;
  CLI::App* sub_run = app.add_subcommand("run", "execute on the engine");
  sub_run->add_option("--graph", run.graph, "graph JSON path")->required();
  sub_run->add_option("--profile", run.profile, "profile JSON path");
  sub_run->add_option("--trace", run.trace, "Chrome trace output path");
  sub_run->add_option("--executors", run.executors, "executor count");
  sub_run->add_option("--threads-per-executor", run.threads_per_executor,
                      "threads per executor");
  sub_run->add_option("--policy", run.policy, "cpf|fifo|lifo|preferred");
  sub_run->add_option("--iters", run.iters, "iterations");
  sub_run->add_option("--pin", run.pin, "none|compact-tiles");
  sub_run->add_option("--tile-size", run.tile_size, "cores per tile");

  SimulateArgs sim;
  CLI::App* sub_sim = app.add_subcommand("simulate", "replay policies");
  sub_sim->add_option("--graph", sim.graph, "graph JSON path")->required();
  sub_sim->add_option("--profile", sim.profile,
                      "profile JSON for durations (default: declared)");
  sub_sim->add_option("--m", sim.m_list, "executor counts, comma separated");
  sub_sim->add_option("--policies", sim.policies, "policies, comma separated");

  BenchArgs bench;
  CLI::App* sub_bench = app.add_subcommand("bench", "kernel and channel benchmarks");
  sub_bench->add_option("--kernel", bench.kernel, "matmul|elementwise");
  sub_bench->add_option("--teams", bench.teams, "team sizes, comma separated");
  sub_bench->add_option("--mode", bench.mode,
                        "pinned|unpinned|shared-queue-contention");
  sub_bench->add_option("--executors", bench.executors, "contention executors");
  sub_bench->add_option("--op-us", bench.op_us, "contention op duration us");
  sub_bench->add_option("--ops", bench.ops, "contention total ops");
  sub_bench->add_option("--out", bench.out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_gen->parsed()) return cmd_gen(gen);
    if (sub_prof->parsed()) return cmd_profile(prof);
    if (sub_run->parsed()) return cmd_run(run);
    if (sub_sim->parsed()) return cmd_simulate(sim);
    if (sub_bench->parsed()) return cmd_bench(bench);
  } catch (const graphi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
