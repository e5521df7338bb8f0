#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "kino/optimize.hpp"
#include "kino/planners.hpp"
#include "kino/world.hpp"

namespace kino {

enum class Method { kBbRrt, kRrtBi, kRrtConnect, kBbOpt, kLiftOpt };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kBbRrt: return "bb-rrt";
    case Method::kRrtBi: return "rrt-bi";
    case Method::kRrtConnect: return "rrt-connect";
    case Method::kBbOpt: return "bb-opt";
    case Method::kLiftOpt: return "lift-opt";
  }
  return "?";
}

struct BenchSpec {
  Method method = Method::kBbRrt;
  int runs = 1;
  std::uint64_t base_seed = 0;
  PhaseStateN x_init;
  PhaseStateN x_goal;
  int max_iterations = 10000;
  Metric metric = Metric::kRho1;
  double resolution = 0.0;
  BaselineParams baseline;
  ShortcutConfig shortcut;
  double rrt_step = 0.0;
  int rrt_max_iterations = 100000;
  bool record_wall_time = true;  // false pins runtime_s to 0 for
                                 // byte-reproducible output
  int threads = 1;
};

struct RunRow {
  std::uint64_t seed = 0;
  bool solved = false;
  bool has_nodes = true;
  bool has_traj = true;
  double runtime_s = 0.0;
  double nodes = 0.0;
  double collision_checks = 0.0;
  double traj_time = 0.0;
};

struct Aggregate {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
};

inline Aggregate aggregate_of(std::vector<double> v) {
  Aggregate a;
  if (v.empty()) return a;
  double sum = 0.0;
  for (double x : v) sum += x;
  a.mean = sum / v.size();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  a.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double ss = 0.0;
  for (double x : v) ss += (x - a.mean) * (x - a.mean);
  a.stddev = std::sqrt(ss / n);
  return a;
}

struct BenchStats {
  std::vector<RunRow> rows;
  int solved_count = 0;
  Aggregate runtime, nodes, checks, traj_time;  // traj_time over solved runs
};

/// Executes one planner run for seed `seed` per the spec.
inline RunRow bench_run_one(const Scene& scene, const BenchSpec& spec,
                            std::uint64_t seed) {
  RunRow row;
  row.seed = seed;
  PlanQuery query;
  query.x_init = spec.x_init;
  query.x_goal = spec.x_goal;
  query.max_iterations = spec.max_iterations;
  query.seed = seed;
  query.metric = spec.metric;
  query.resolution = spec.resolution;

  switch (spec.method) {
    case Method::kBbRrt: {
      const PlanResult r = bb_rrt_bidirectional(scene, query);
      row.solved = r.solved();
      row.runtime_s = r.stats.wall_time_s;
      row.nodes = r.stats.nodes;
      row.collision_checks = static_cast<double>(r.stats.collision_checks);
      row.traj_time = r.stats.traj_time;
      break;
    }
    case Method::kRrtBi: {
      const PlanResult r =
          baseline_rrt_bidirectional(scene, query, spec.baseline);
      row.solved = r.solved();
      row.runtime_s = r.stats.wall_time_s;
      row.nodes = r.stats.nodes;
      row.collision_checks = static_cast<double>(r.stats.collision_checks);
      row.traj_time = r.stats.traj_time;
      break;
    }
    case Method::kRrtConnect: {
      const GeoPlanResult r = rrt_connect_geometric(
          scene, spec.x_init.q, spec.x_goal.q,
          spec.rrt_step > 0.0 ? spec.rrt_step : scene.resolution, seed,
          spec.rrt_max_iterations, spec.resolution);
      row.solved = r.solved();
      row.runtime_s = r.wall_time_s;
      row.nodes = r.nodes;
      row.collision_checks = static_cast<double>(r.collision_checks);
      row.has_traj = false;  // geometric planner produces no trajectory
      break;
    }
    case Method::kBbOpt: {
      // Plan with BB-RRT, then report the optimization pass (the planner
      // provides the initial trajectory, as in the paper's workflow).
      const PlanResult r = bb_rrt_bidirectional(scene, query);
      row.solved = r.solved();
      row.has_nodes = false;
      if (r.solved()) {
        ShortcutConfig cfg = spec.shortcut;
        cfg.seed = seed;
        if (cfg.collision_resolution <= 0.0)
          cfg.collision_resolution =
              spec.resolution > 0.0 ? spec.resolution : scene.resolution;
        const auto t0 = std::chrono::steady_clock::now();
        auto [opt, trace] = optimize_trajectory(scene, *r.trajectory, cfg);
        row.runtime_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        row.collision_checks = static_cast<double>(trace.collision_checks);
        row.traj_time = opt.duration;
      }
      break;
    }
    case Method::kLiftOpt: {
      LiftConfig lift;
      lift.rrt_step = spec.rrt_step;
      lift.rrt_max_iterations = spec.rrt_max_iterations;
      lift.seed = seed;
      ShortcutConfig cfg = spec.shortcut;
      cfg.seed = seed;
      const LiftResult r =
          lift_and_optimize(scene, spec.x_init.q, spec.x_goal.q, lift, cfg);
      row.solved = r.plan.solved();
      row.runtime_s = r.plan.stats.wall_time_s;
      row.nodes = r.plan.stats.nodes;
      row.collision_checks =
          static_cast<double>(r.plan.stats.collision_checks);
      row.traj_time = r.plan.stats.traj_time;
      break;
    }
  }
  if (!spec.record_wall_time) row.runtime_s = 0.0;
  return row;
}

/// Runs `spec.runs` seeded planner invocations (seeds base_seed ..
/// base_seed + runs - 1). Runs are independent and may execute on worker
/// threads; rows always come back in seed order.
inline BenchStats run_bench(const Scene& scene, const BenchSpec& spec) {
  BenchStats stats;
  stats.rows.resize(spec.runs);

  const int workers =
      std::max(1, std::min(spec.threads, spec.runs));
  if (workers == 1) {
    for (int i = 0; i < spec.runs; ++i)
      stats.rows[i] = bench_run_one(scene, spec, spec.base_seed + i);
  } else {
    std::atomic<int> next{0};
    auto work = [&] {
      for (int i = next.fetch_add(1); i < spec.runs; i = next.fetch_add(1))
        stats.rows[i] = bench_run_one(scene, spec, spec.base_seed + i);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<double> rt, nd, cc, tt;
  for (const auto& row : stats.rows) {
    if (row.solved) ++stats.solved_count;
    rt.push_back(row.runtime_s);
    if (row.has_nodes) nd.push_back(row.nodes);
    cc.push_back(row.collision_checks);
    if (row.solved && row.has_traj) tt.push_back(row.traj_time);
  }
  stats.runtime = aggregate_of(rt);
  stats.nodes = aggregate_of(nd);
  stats.checks = aggregate_of(cc);
  stats.traj_time = aggregate_of(tt);
  return stats;
}

namespace detail {

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

/// CSV with one row per run plus an aggregate (mean) row. Columns that do
/// not apply to a method print "-" (as in the reference statistics table).
inline std::string bench_csv(const BenchStats& stats) {
  std::string out = "seed,outcome,runtime_s,nodes,collision_checks,traj_time\n";
  for (const auto& row : stats.rows) {
    out += std::to_string(row.seed);
    out += row.solved ? ",solution," : ",failure,";
    out += detail::csv_num(row.runtime_s);
    out += ",";
    out += row.has_nodes ? detail::csv_num(row.nodes) : std::string("-");
    out += ",";
    out += detail::csv_num(row.collision_checks);
    out += ",";
    out += row.solved && row.has_traj ? detail::csv_num(row.traj_time)
                                      : std::string("-");
    out += "\n";
  }
  const double frac =
      stats.rows.empty()
          ? 0.0
          : static_cast<double>(stats.solved_count) / stats.rows.size();
  out += "aggregate," + detail::csv_num(frac) + "," +
         detail::csv_num(stats.runtime.mean) + "," +
         detail::csv_num(stats.nodes.mean) + "," +
         detail::csv_num(stats.checks.mean) + "," +
         detail::csv_num(stats.traj_time.mean) + "\n";
  return out;
}

}  // namespace kino
