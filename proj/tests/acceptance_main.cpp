// Acceptance gate: runs every promised property end to end and prints one
// verdict line per criterion. PASS/FAIL lines assert pinned tolerances; a
// criterion whose hardware precondition this host cannot meet (core count)
// reports SKIP with the reason instead of faking a measurement. The process
// exits nonzero iff any criterion FAILs.

#include <graphi/bench.hpp>
#include <graphi/graphi.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"

using namespace graphi;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
};

Outcome pass(std::string detail) { return {Status::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Status::Fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Status::Skip, std::move(detail)}; }

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---- criterion 1: engine dependency soundness and exactly-once ----

Outcome criterion_soundness() {
  const SchedulePolicy policies[4] = {
      SchedulePolicy::Cpf, SchedulePolicy::Fifo, SchedulePolicy::Lifo,
      SchedulePolicy::PreferredExecutor};
  for (int i = 0; i < 100; ++i) {
    const int n = 5 + i % 46;  // 5..50
    auto [graph, durations] =
        gen_random_dag(n, 0.25, {20.0, 120.0}, 9000 + i);
    const auto levels = compute_levels(graph, durations);
    ExecutionConfig cfg;
    cfg.num_executors = 2 + i % 7;  // 2..8
    cfg.policy = policies[i % 4];
    auto engine = start_engine(graph, cfg, &levels, &durations);
    for (int iter = 0; iter < 2; ++iter) {
      const Trace trace = engine->run_iteration();
      std::string problem;
      testutil::check_trace_sound(graph, trace.events, problem);
      if (!problem.empty()) {
        return fail("dag seed " + std::to_string(9000 + i) + ": " + problem);
      }
      if (trace.events.size() != graph.num_ops()) {
        return fail("dag seed " + std::to_string(9000 + i) +
                    ": trace has " + std::to_string(trace.events.size()) +
                    " events for " + std::to_string(graph.num_ops()) + " ops");
      }
    }
    engine->shutdown();
  }
  return pass("100 dags (n<=50, 2-8 executors, 4 policies), every trace "
              "dependency-sound and exactly-once");
}

// ---- criterion 2: kernel oracle equivalence ----

Outcome criterion_kernels() {
  std::mt19937_64 rng(77);
  double worst_rel = 0.0;
  for (int round = 0; round < 50; ++round) {
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % 128);
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 128);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 128);
    Tensor a = make_matrix(m, k);
    Tensor b = make_matrix(k, n);
    a.fill_random(rng());
    b.fill_random(rng());
    const Tensor want = reference_matmul(a, b);
    for (int team_size : {1, 2, 4, 8}) {
      ThreadTeam team(team_size);
      const Tensor got = matmul(a, b, team);
      for (std::size_t i = 0; i < want.data.size(); ++i) {
        const double denom = std::max(1e-30, double(std::abs(want.data[i])));
        worst_rel = std::max(
            worst_rel, double(std::abs(got.data[i] - want.data[i])) / denom);
      }
    }
  }
  if (worst_rel > 1e-6) {
    return fail("matmul max relative error " + std::to_string(worst_rel) +
                " > 1e-6");
  }

  Tensor x = make_vector(4097);
  Tensor y = make_vector(4097);
  x.fill_random(5);
  y.fill_random(6);
  for (EwKind kind : {EwKind::Add, EwKind::Mul, EwKind::Relu, EwKind::Sigmoid,
                      EwKind::Tanh}) {
    ThreadTeam t1(1);
    const Tensor* second = is_binary(kind) ? &y : nullptr;
    const Tensor base = elementwise(kind, x, second, t1);
    for (int team_size : {2, 4, 8}) {
      ThreadTeam team(team_size);
      const Tensor got = elementwise(kind, x, second, team);
      for (std::size_t i = 0; i < base.data.size(); ++i) {
        if (got.data[i] != base.data[i]) {
          return fail("elementwise not bitwise identical across team sizes");
        }
      }
    }
  }
  return pass("50 matmul shapes <=128^3 x teams {1,2,4,8} max rel err " +
              std::to_string(worst_rel) +
              " <= 1e-6; elementwise bitwise identical");
}

// ---- criterion 3: Hu optimality on unit in-forests ----

Outcome criterion_hu() {
  for (int s = 0; s < 200; ++s) {
    const int n = 3 + s % 10;  // 3..12
    const int m = 2 + s % 2;
    auto [graph, durations] = testutil::random_in_forest(n, 500 + s);
    const auto levels = compute_levels(graph, durations);
    const double sim =
        simulate(graph, durations, &levels, m, SchedulePolicy::Cpf)
            .makespan_us;
    const double opt = optimal_makespan(graph, durations, m);
    if (sim != opt) {
      return fail("forest seed " + std::to_string(500 + s) + " m=" +
                  std::to_string(m) + ": cpf " + std::to_string(sim) +
                  " != optimal " + std::to_string(opt));
    }
  }
  return pass("200 unit in-forests (n<=12, m in {2,3}): cpf == optimal "
              "makespan exactly on every instance");
}

// ---- criterion 4: Graham bound and lower bounds ----

Outcome criterion_graham() {
  const SchedulePolicy policies[3] = {SchedulePolicy::Cpf, SchedulePolicy::Fifo,
                                      SchedulePolicy::Lifo};
  for (int s = 0; s < 200; ++s) {
    const int n = 2 + s % 9;  // 2..10
    const int m = 2 + s % 2;
    auto [graph, durations] = gen_random_dag(n, 0.3, {10.0, 100.0}, 700 + s);
    const auto levels = compute_levels(graph, durations);
    const double opt = optimal_makespan(graph, durations, m);
    const double cp = critical_path_length(graph, durations);
    const double work = total_work(graph, durations);
    const double lower = std::max(cp, work / m);
    const double graham = (2.0 - 1.0 / m) * opt;
    for (SchedulePolicy policy : policies) {
      const double ms =
          simulate(graph, durations, &levels, m, policy).makespan_us;
      if (ms > graham * (1.0 + 1e-12) + 1e-9) {
        return fail("seed " + std::to_string(700 + s) + " m=" +
                    std::to_string(m) + " " + to_string(policy) + ": " +
                    std::to_string(ms) + " above Graham bound " +
                    std::to_string(graham));
      }
      if (ms + 1e-9 < lower) {
        return fail("seed " + std::to_string(700 + s) + " m=" +
                    std::to_string(m) + " " + to_string(policy) + ": " +
                    std::to_string(ms) + " below lower bound " +
                    std::to_string(lower));
      }
    }
  }
  return pass("200 dags (n<=10, m in {2,3}) x {cpf,fifo,lifo}: all makespans "
              "in [max(cp, work/m), (2-1/m)*OPT]");
}

// ---- criterion 5: wavefront recovery on the cell-level LSTM grid ----

Outcome criterion_wavefront() {
  const int layers = 4, steps = 10;
  const double d = 100.0;
  std::vector<OperationSpec> ops;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  auto id_of = [&](int l, int t) { return std::int64_t(l) * steps + t; };
  for (int l = 0; l < layers; ++l) {
    for (int t = 0; t < steps; ++t) {
      OperationSpec op;
      op.id = id_of(l, t);
      op.name = "cell." + std::to_string(l) + "." + std::to_string(t);
      op.kind = SyntheticOp{d};
      ops.push_back(op);
      if (l > 0) edges.push_back({id_of(l - 1, t), id_of(l, t)});
      if (t > 0) edges.push_back({id_of(l, t - 1), id_of(l, t)});
    }
  }
  const auto graph = build_graph(ops, edges);
  const auto durations = declared_durations(graph);
  const auto levels = compute_levels(graph, durations);
  const auto result = simulate(graph, durations, &levels, 4,
                               SchedulePolicy::Cpf);
  std::map<std::int64_t, double> start;
  for (const auto& ev : result.events) start[ev.op_id] = ev.start_us;
  for (int l = 0; l < layers; ++l) {
    for (int t = 0; t < steps; ++t) {
      const double want = (l + t) * d;
      if (start.at(id_of(l, t)) != want) {
        return fail("cell (" + std::to_string(l) + "," + std::to_string(t) +
                    ") starts at " + std::to_string(start.at(id_of(l, t))) +
                    ", wavefront predicts " + std::to_string(want));
      }
    }
  }
  return pass("4x10 grid, uniform d=100us, m=4: every cell starts exactly at "
              "(l+t)*d under cpf");
}

// ---- criterion 6a: cpf vs fifo on heterogeneous LSTM-like instances ----

Outcome criterion_policy_improvement() {
  int cpf_strictly_better = 0;
  double mean_cpf = 0.0, mean_fifo = 0.0;
  // 8 layers x 12 steps: the widest wavefront holds 16 entry matmuls, twice
  // the executor count, so the dispatch order actually matters. Narrower
  // grids never oversubscribe m = 8 and every policy gives one schedule.
  const auto graph = gen_lstm(8, 12, 8, 4);
  for (int s = 0; s < 100; ++s) {
    std::mt19937_64 rng(3000 + s);
    std::uniform_real_distribution<double> heavy(300.0, 3000.0);
    std::uniform_real_distribution<double> light(20.0, 300.0);
    DurationTable durations;
    for (const auto& op : graph.ops()) {
      if (std::holds_alternative<MatMulOp>(op.kind)) {
        durations.set(op.id, heavy(rng));
      } else if (std::holds_alternative<ElementwiseOp>(op.kind)) {
        durations.set(op.id, light(rng));
      } else {
        durations.set(op.id, 1.0);
      }
    }
    const auto levels = compute_levels(graph, durations);
    const double cpf =
        simulate(graph, durations, &levels, 8, SchedulePolicy::Cpf)
            .makespan_us;
    const double fifo =
        simulate(graph, durations, nullptr, 8, SchedulePolicy::Fifo)
            .makespan_us;
    mean_cpf += cpf;
    mean_fifo += fifo;
    if (cpf < fifo - 1e-9) ++cpf_strictly_better;
  }
  mean_cpf /= 100.0;
  mean_fifo /= 100.0;
  if (mean_cpf > mean_fifo) {
    return fail("mean cpf makespan " + std::to_string(mean_cpf) +
                " > mean fifo " + std::to_string(mean_fifo));
  }
  if (cpf_strictly_better < 30) {
    return fail("cpf strictly better on only " +
                std::to_string(cpf_strictly_better) + "/100 instances (< 30)");
  }
  char buf[176];
  std::snprintf(buf, sizeof(buf),
                "100 heterogeneous 8x12 lstm instances, m=8: mean cpf %.0fus "
                "<= mean fifo %.0fus, strictly better on %d/100",
                mean_cpf, mean_fifo, cpf_strictly_better);
  return pass(buf);
}

// ---- criterion 6b: spsc buffers vs shared queue ----

Outcome criterion_contention() {
  const int cores = static_cast<int>(detected_cores());
  if (cores < 8) {
    return skip("needs a >= 8-core host for 8 contending executors, this "
                "host has " + std::to_string(cores));
  }
  const ContentionResult r = bench_contention(8, 10.0);
  const double ratio = r.spsc_ops_per_sec / r.shared_ops_per_sec;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "8 executors, 10us ops: spsc %.0f ops/s vs shared %.0f ops/s "
                "(%.2fx)",
                r.spsc_ops_per_sec, r.shared_ops_per_sec, ratio);
  if (ratio < 1.5) return fail(buf);
  return pass(buf);
}

// ---- criteria 7 and 8 share the 32-op synthetic graph ----

ComputationGraph independent_synthetic_graph(int n, double us) {
  std::vector<OperationSpec> ops;
  for (int i = 0; i < n; ++i) {
    OperationSpec op;
    op.id = i;
    op.name = "syn" + std::to_string(i);
    op.kind = SyntheticOp{us};
    ops.push_back(op);
  }
  return build_graph(ops, {});
}

Outcome criterion_parallel_speedup() {
  const int cores = static_cast<int>(detected_cores());
  if (cores < 8) {
    return skip("needs a >= 8-core host for 8 single-thread executors, this "
                "host has " + std::to_string(cores));
  }
  const auto graph = independent_synthetic_graph(32, 5000.0);
  auto run_with = [&](int executors, int threads) {
    ExecutionConfig cfg;
    cfg.num_executors = executors;
    cfg.threads_per_executor = threads;
    auto engine = start_engine(graph, cfg);
    engine->run_iteration();  // warm the pools
    const double ms = engine->run_iteration().makespan_us();
    engine->shutdown();
    return ms;
  };
  const double serial = run_with(1, 8);
  const double parallel = run_with(8, 1);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "32 x 5000us synthetic: 8x1 %.0fus vs 1x8 %.0fus (ratio %.3f, "
                "needs <= 0.25)",
                parallel, serial, parallel / serial);
  if (parallel <= 0.25 * serial) return pass(buf);
  return fail(buf);
}

Outcome criterion_profiler_argmin() {
  const int cores = static_cast<int>(detected_cores());
  // The argmin bookkeeping is asserted on every host; the ">= 4 executors"
  // claim needs real parallel hardware.
  const auto check_consistent = [](const Profile& p) -> bool {
    double best = p.makespans[0].second;
    for (const auto& [cfg, us] : p.makespans) best = std::min(best, us);
    for (const auto& [cfg, us] : p.makespans) {
      if (us == best && config_label(cfg) == config_label(p.chosen)) {
        return true;
      }
    }
    return false;
  };
  if (cores < 8) {
    const auto profile =
        profile_graph(gen_diamond(200.0), enumerate_configs(2), 1, 3);
    if (!check_consistent(profile)) {
      return fail("chosen config does not attain the recorded minimum");
    }
    return skip("argmin bookkeeping verified on a 2-core table; the >= 4 "
                "executors claim needs a >= 8-core host, this host has " +
                std::to_string(cores));
  }
  const auto graph = independent_synthetic_graph(32, 5000.0);
  const auto profile = profile_graph(graph, enumerate_configs(8), 2, 5);
  if (!check_consistent(profile)) {
    return fail("chosen config does not attain the recorded minimum");
  }
  if (profile.chosen.num_executors < 4) {
    return fail("profiler chose " + config_label(profile.chosen) +
                ", expected >= 4 executors");
  }
  return pass("profile over enumerate_configs(8) chose " +
              config_label(profile.chosen) +
              " and its makespan is the table minimum");
}

// ---- criterion 9: format fidelity ----

Outcome criterion_formats() {
  int round_trips = 0;
  for (Model model : {Model::Lstm, Model::PhasedLstm, Model::PathNet,
                      Model::Inception, Model::Random, Model::Diamond}) {
    for (SizePreset size :
         {SizePreset::Small, SizePreset::Medium, SizePreset::Large}) {
      ModelParams params;
      params.model = model;
      params.size = size;
      const auto generated = generate(params);
      const json j = graph_to_json(generated.graph);
      const auto restored = graph_from_json(json::parse(j.dump()));
      if (!(restored == generated.graph)) {
        return fail(std::string(to_string(model)) + "/" + to_string(size) +
                    " graph changed across the json round trip");
      }
      ++round_trips;
    }
  }

  // A real execution trace must parse as Chrome trace-event JSON.
  const auto graph = gen_lstm(1, 2, 4, 2);
  ExecutionConfig cfg;
  cfg.num_executors = 2;
  cfg.policy = SchedulePolicy::Fifo;  // no profile yet, so no level values
  auto engine = start_engine(graph, cfg);
  const Trace trace = engine->run_iteration();
  engine->shutdown();
  const auto chrome = json::parse(trace_to_chrome_json(trace.events, graph).dump());
  if (!chrome.is_array() || chrome.size() != graph.num_ops()) {
    return fail("chrome trace is not an array with one event per op");
  }
  for (const auto& ev : chrome) {
    for (const char* key : {"name", "ph", "ts", "dur", "pid", "tid"}) {
      if (!ev.contains(key)) {
        return fail(std::string("chrome trace event missing key '") + key +
                    "'");
      }
    }
    if (ev.at("ph") != "X") return fail("chrome trace event is not phase X");
  }
  return pass(std::to_string(round_trips) +
              " preset graphs identical across the json round trip; engine "
              "trace parses as complete-event chrome json");
}

// ---- criterion 10: non-reproducibility statement ----

Outcome criterion_statement() {
  return pass("framework-comparison speedups and hardware saturation/pinning "
              "curves are cmd_bench measurement targets on real multicore "
              "hosts, reported by the bench command and never asserted by "
              "tests");
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1", "engine dependency soundness", criterion_soundness},
      {"2", "kernel oracle equivalence", criterion_kernels},
      {"3", "hu optimality", criterion_hu},
      {"4", "graham bound", criterion_graham},
      {"5", "wavefront recovery", criterion_wavefront},
      {"6a", "cpf vs fifo improvement", criterion_policy_improvement},
      {"6b", "spsc vs shared queue", criterion_contention},
      {"7", "parallel vs sequential engine", criterion_parallel_speedup},
      {"8", "profiler argmin", criterion_profiler_argmin},
      {"9", "format fidelity", criterion_formats},
      {"10", "non-reproducibility statement", criterion_statement},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    const double t0 = now_s();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("unexpected error: ") + e.what());
    }
    const double dt = now_s() - t0;
    const char* tag = outcome.status == Status::Pass   ? "PASS"
                      : outcome.status == Status::Fail ? "FAIL"
                                                       : "SKIP";
    if (outcome.status == Status::Fail) ++failures;
    std::printf("[%3s] %-4s %-32s %s (%.1fs)\n", criterion.id, tag,
                criterion.name, outcome.detail.c_str(), dt);
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria pass (skips are host preconditions, printed "
              "above)\n");
  return 0;
}
