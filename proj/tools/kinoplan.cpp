// kinoplan: command-line front end for the bang-bang kinodynamic planning
// library. Subcommands: steer, plan, optimize, lift, bench, render.
// Exit codes: 0 success, 1 planner failure, 2 input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kino/bench.hpp"
#include "kino/json_io.hpp"
#include "kino/optimize.hpp"
#include "kino/planners.hpp"
#include "kino/steering.hpp"
#include "kino/svg.hpp"
#include "kino/trajectory.hpp"
#include "kino/world.hpp"

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size())
      throw std::invalid_argument("cannot parse number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Phase states are written "q0,qd0;q1,qd1;..." on the command line.
kino::PhaseStateN parse_state(const std::string& text) {
  kino::PhaseStateN x;
  std::stringstream ss(text);
  std::string axis;
  while (std::getline(ss, axis, ';')) {
    if (axis.empty()) continue;
    const auto pair = parse_numbers(axis, ',');
    if (pair.size() != 2)
      throw std::invalid_argument("state axis needs 'q,qd': '" + axis + "'");
    x.q.push_back(pair[0]);
    x.qd.push_back(pair[1]);
  }
  if (x.q.empty()) throw std::invalid_argument("empty state");
  return x;
}

std::vector<kino::AccelBounds> parse_bounds(const std::string& text) {
  std::vector<kino::AccelBounds> out;
  std::stringstream ss(text);
  std::string axis;
  while (std::getline(ss, axis, ';')) {
    if (axis.empty()) continue;
    const auto pair = parse_numbers(axis, ',');
    if (pair.size() != 2)
      throw std::invalid_argument("bounds axis needs 'a_min,a_max'");
    out.push_back({pair[0], pair[1]});
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

kino::Metric parse_metric(const std::string& name) {
  if (name == "rho1") return kino::Metric::kRho1;
  if (name == "rho2") return kino::Metric::kRho2;
  throw std::invalid_argument("metric must be rho1 or rho2");
}

kino::Method parse_method(const std::string& name) {
  if (name == "bb-rrt") return kino::Method::kBbRrt;
  if (name == "rrt-bi") return kino::Method::kRrtBi;
  if (name == "rrt-connect") return kino::Method::kRrtConnect;
  if (name == "bb-opt") return kino::Method::kBbOpt;
  if (name == "lift-opt") return kino::Method::kLiftOpt;
  throw std::invalid_argument("unknown method: " + name);
}

// Closed-chain regular polygon configurations used by the manipulator
// experiments: every relative joint angle is the polygon exterior angle,
// wound one way for the start and the other way for the goal.
std::vector<double> regular_polygon_config(int links, bool mirrored) {
  std::vector<double> q(links, (mirrored ? -1.0 : 1.0) * 2.0 *
                                   std::numbers::pi / links);
  q[0] = 0.0;
  return q;
}

void print_plan_summary(const kino::PlanResult& r) {
  std::printf("outcome: %s\n", r.solved() ? "solution" : "failure");
  std::printf("iterations: %d\nnodes: %d\ncollision_checks: %lld\n",
              r.stats.iterations, r.stats.nodes,
              static_cast<long long>(r.stats.collision_checks));
  std::printf("wall_time_s: %.9g\n", r.stats.wall_time_s);
  if (r.solved()) std::printf("traj_time: %.9g\n", r.stats.traj_time);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinodynamic planning with bang-bang time-optimal steering"};
  app.require_subcommand(1);

  // ---- steer ----
  auto* steer = app.add_subcommand(
      "steer", "Solve one n-D time-optimal steering query");
  std::string steer_from, steer_to, steer_bounds, steer_out;
  steer->add_option("--from", steer_from, "initial state 'q,qd;q,qd;...'")
      ->required();
  steer->add_option("--to", steer_to, "goal state")->required();
  steer->add_option("--bounds", steer_bounds,
                    "per-axis accel bounds 'a_min,a_max;...'")
      ->required();
  steer->add_option("--out", steer_out, "write trajectory JSON here");

  // ---- plan ----
  auto* plan = app.add_subcommand("plan", "Run a planner on a scene");
  std::string plan_scene, plan_method = "bb-rrt", plan_start, plan_goal;
  std::string plan_metric = "rho1", plan_out, plan_svg;
  std::uint64_t plan_seed = 0;
  int plan_iters = 10000;
  double plan_res = 0.0;
  bool plan_tree = false;
  plan->add_option("--scene", plan_scene, "scene JSON file")->required();
  plan->add_option("--method", plan_method, "bb-rrt | rrt-bi | rrt-connect");
  plan->add_option("--start", plan_start, "start state")->required();
  plan->add_option("--goal", plan_goal, "goal state")->required();
  plan->add_option("--seed", plan_seed, "RNG seed");
  plan->add_option("--max-iters", plan_iters, "iteration cap");
  plan->add_option("--metric", plan_metric, "rho1 | rho2");
  plan->add_option("--resolution", plan_res, "collision-check spacing");
  plan->add_option("--out", plan_out, "write trajectory JSON here");
  plan->add_option("--svg", plan_svg, "write workspace SVG here");
  plan->add_flag("--tree", plan_tree, "include tree edges in the SVG");

  // ---- optimize ----
  auto* opt = app.add_subcommand(
      "optimize", "Shortcut-optimize a trajectory against a scene");
  std::string opt_scene, opt_traj, opt_out;
  std::uint64_t opt_seed = 0;
  int opt_iters = 10000, opt_window = 200;
  double opt_eps = 0.1, opt_res = 0.0;
  bool opt_halton = false;
  opt->add_option("--scene", opt_scene, "scene JSON file")->required();
  opt->add_option("--traj", opt_traj, "input trajectory JSON")->required();
  opt->add_option("--seed", opt_seed, "RNG seed");
  opt->add_option("--max-iters", opt_iters, "iteration cap");
  opt->add_option("--stall-window", opt_window,
                  "attempts without improvement before stopping");
  opt->add_option("--stall-eps", opt_eps, "improvement threshold");
  opt->add_option("--resolution", opt_res, "collision-check spacing");
  opt->add_flag("--halton", opt_halton, "deterministic Halton intervals");
  opt->add_option("--out", opt_out, "write optimized trajectory here");

  // ---- lift ----
  auto* lift = app.add_subcommand(
      "lift", "Plan rest-to-rest: RRT-Connect, bang-bang lift, optimize");
  std::string lift_scene, lift_start, lift_goal, lift_out, lift_svg;
  std::string lift_preset;
  std::uint64_t lift_seed = 0;
  int lift_iters = 100000, lift_opt_iters = 10000, lift_window = 200;
  double lift_step = 0.0, lift_eps = 0.1, lift_res = 0.0;
  bool lift_raw = false;
  lift->add_option("--scene", lift_scene, "scene JSON file")->required();
  lift->add_option("--start-config", lift_start, "start configuration");
  lift->add_option("--goal-config", lift_goal, "goal configuration");
  lift->add_option("--preset", lift_preset,
                   "query preset: regular-polygon (chain scenes)");
  lift->add_option("--seed", lift_seed, "RNG seed");
  lift->add_option("--rrt-step", lift_step, "RRT-Connect extension step");
  lift->add_option("--rrt-max-iters", lift_iters, "RRT-Connect cap");
  lift->add_option("--max-iters", lift_opt_iters, "optimizer cap");
  lift->add_option("--stall-window", lift_window, "optimizer stall window");
  lift->add_option("--stall-eps", lift_eps, "optimizer stall threshold");
  lift->add_option("--resolution", lift_res, "collision-check spacing");
  lift->add_flag("--raw", lift_raw, "skip optimization, emit the raw lift");
  lift->add_option("--out", lift_out, "write trajectory JSON here");
  lift->add_option("--svg", lift_svg, "write workspace SVG here");

  // ---- bench ----
  auto* bench = app.add_subcommand(
      "bench", "Batch seeded runs with statistics and CSV output");
  std::string bench_scene, bench_method = "bb-rrt", bench_start, bench_goal;
  std::string bench_metric = "rho1", bench_out, bench_timing = "wall";
  std::string bench_preset;
  std::uint64_t bench_seed = 0;
  int bench_runs = 1, bench_iters = 10000, bench_threads = 1;
  int bench_window = 200, bench_rrt_iters = 100000;
  double bench_res = 0.0, bench_eps = 0.1, bench_step = 0.0;
  bench->add_option("--scene", bench_scene, "scene JSON file")->required();
  bench->add_option("--method", bench_method,
                    "bb-rrt | rrt-bi | rrt-connect | bb-opt | lift-opt");
  bench->add_option("--start", bench_start, "start state");
  bench->add_option("--goal", bench_goal, "goal state");
  bench->add_option("--preset", bench_preset,
                    "query preset: regular-polygon (chain scenes)");
  bench->add_option("--runs", bench_runs, "number of seeded runs");
  bench->add_option("--base-seed", bench_seed, "first seed");
  bench->add_option("--max-iters", bench_iters, "planner iteration cap");
  bench->add_option("--metric", bench_metric, "rho1 | rho2");
  bench->add_option("--resolution", bench_res, "collision-check spacing");
  bench->add_option("--stall-window", bench_window, "optimizer stall window");
  bench->add_option("--stall-eps", bench_eps, "optimizer stall threshold");
  bench->add_option("--rrt-step", bench_step, "RRT-Connect step");
  bench->add_option("--rrt-max-iters", bench_rrt_iters, "RRT-Connect cap");
  bench->add_option("--threads", bench_threads, "worker threads");
  bench->add_option("--timing", bench_timing,
                    "wall | none (none pins runtime_s to 0 so output is "
                    "byte-reproducible)");
  bench->add_option("--out", bench_out, "write CSV here");

  // ---- render ----
  auto* render = app.add_subcommand("render", "Render scene and results");
  std::string render_scene, render_mode = "workspace", render_out;
  std::vector<std::string> render_trajs;
  std::size_t render_axis = 0;
  render->add_option("--scene", render_scene, "scene JSON file")->required();
  render->add_option("--traj", render_trajs, "trajectory JSON (repeatable)");
  render->add_option("--mode", render_mode, "workspace | phase");
  render->add_option("--axis", render_axis, "phase-plane axis");
  render->add_option("--out", render_out, "output SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*steer) {
      const auto from = parse_state(steer_from);
      const auto to = parse_state(steer_to);
      const auto bounds = parse_bounds(steer_bounds);
      const kino::SteeringPlanN sp = kino::steer_nd(from, to, bounds);
      std::printf("arrival_time: %.9g\n", sp.arrival_time);
      for (std::size_t i = 0; i < sp.per_axis.size(); ++i) {
        std::printf("axis %zu:", i);
        for (const auto& s : sp.per_axis[i].normalized().segments)
          std::printf(" (a=%.9g, dt=%.9g)", s.accel, s.duration);
        std::printf("\n");
      }
      if (!steer_out.empty())
        kino::save_json(
            kino::trajectory_to_json(kino::make_trajectory(from, sp)),
            steer_out);
      return 0;
    }

    if (*plan) {
      const kino::Scene scene = kino::load_scene(plan_scene);
      const kino::Method method = parse_method(plan_method);
      kino::PlanQuery query;
      query.x_init = parse_state(plan_start);
      query.x_goal = parse_state(plan_goal);
      query.seed = plan_seed;
      query.max_iterations = plan_iters;
      query.metric = parse_metric(plan_metric);
      query.resolution = plan_res;
      query.capture_tree_edges = plan_tree;

      kino::RenderArtifacts art;
      bool solved = false;
      if (method == kino::Method::kBbRrt || method == kino::Method::kRrtBi) {
        const kino::PlanResult r =
            method == kino::Method::kBbRrt
                ? kino::bb_rrt_bidirectional(scene, query)
                : kino::baseline_rrt_bidirectional(scene, query, {});
        print_plan_summary(r);
        solved = r.solved();
        if (r.solved()) {
          if (!plan_out.empty())
            kino::save_json(kino::trajectory_to_json(*r.trajectory),
                            plan_out);
          art.trajectories.push_back(*r.trajectory);
        }
        art.tree_edges = r.tree_edges;
      } else if (method == kino::Method::kRrtConnect) {
        const kino::GeoPlanResult r = kino::rrt_connect_geometric(
            scene, query.x_init.q, query.x_goal.q,
            plan_res > 0.0 ? plan_res : scene.resolution, plan_seed,
            plan_iters);
        solved = r.solved();
        std::printf("outcome: %s\n", solved ? "solution" : "failure");
        std::printf("iterations: %d\nnodes: %d\ncollision_checks: %lld\n",
                    r.iterations, r.nodes,
                    static_cast<long long>(r.collision_checks));
        std::printf("wall_time_s: %.9g\n", r.wall_time_s);
        if (solved) {
          if (!plan_out.empty()) {
            kino::json j;
            j["path"] = *r.path;
            kino::save_json(j, plan_out);
          }
          art.paths.push_back(*r.path);
        }
      } else {
        throw std::invalid_argument(
            "plan supports bb-rrt, rrt-bi, rrt-connect (use lift/optimize "
            "for the optimization pipelines)");
      }
      if (!plan_svg.empty())
        write_text(plan_svg, kino::render_svg(scene, art, {}));
      return solved ? 0 : 1;
    }

    if (*opt) {
      const kino::Scene scene = kino::load_scene(opt_scene);
      const kino::TrajectoryN traj =
          kino::trajectory_from_json(kino::load_json(opt_traj));
      kino::ShortcutConfig cfg;
      cfg.max_iterations = opt_iters;
      cfg.stall_window = opt_window;
      cfg.stall_epsilon = opt_eps;
      cfg.seed = opt_seed;
      cfg.collision_resolution = opt_res;
      cfg.rule = opt_halton ? kino::IntervalRule::kHalton
                            : kino::IntervalRule::kRandomCoin;
      const auto [result, trace] = kino::optimize_trajectory(scene, traj, cfg);
      std::printf("duration: %.9g -> %.9g\n", traj.duration, result.duration);
      std::printf("iterations: %zu\ncollision_checks: %lld\n",
                  trace.iterations.size(),
                  static_cast<long long>(trace.collision_checks));
      if (!opt_out.empty())
        kino::save_json(kino::trajectory_to_json(result), opt_out);
      return 0;
    }

    if (*lift) {
      const kino::Scene scene = kino::load_scene(lift_scene);
      std::vector<double> q0, q1;
      if (lift_preset == "regular-polygon") {
        const auto* chain = std::get_if<kino::PlanarChain>(&scene.robot);
        if (!chain)
          throw std::invalid_argument(
              "--preset regular-polygon needs a chain-robot scene");
        q0 = regular_polygon_config(chain->links, false);
        q1 = regular_polygon_config(chain->links, true);
      } else if (!lift_preset.empty()) {
        throw std::invalid_argument("unknown preset: " + lift_preset);
      } else {
        q0 = parse_numbers(lift_start, ',');
        q1 = parse_numbers(lift_goal, ',');
      }
      kino::LiftConfig lc;
      lc.rrt_step = lift_step;
      lc.rrt_max_iterations = lift_iters;
      lc.seed = lift_seed;
      kino::ShortcutConfig sc;
      sc.max_iterations = lift_raw ? 0 : lift_opt_iters;
      sc.stall_window = lift_window;
      sc.stall_epsilon = lift_eps;
      sc.seed = lift_seed;
      sc.collision_resolution = lift_res;
      const kino::LiftResult r =
          kino::lift_and_optimize(scene, q0, q1, lc, sc);
      print_plan_summary(r.plan);
      if (r.plan.solved())
        std::printf("raw_lift_time: %.9g\npath_vertices: %d\n",
                    r.raw_duration, r.path_vertices);
      if (r.plan.solved() && !lift_out.empty())
        kino::save_json(kino::trajectory_to_json(*r.plan.trajectory),
                        lift_out);
      if (r.plan.solved() && !lift_svg.empty()) {
        kino::RenderArtifacts art;
        art.trajectories.push_back(*r.plan.trajectory);
        art.paths.push_back(r.path);
        write_text(lift_svg, kino::render_svg(scene, art, {}));
      }
      return r.plan.solved() ? 0 : 1;
    }

    if (*bench) {
      const kino::Scene scene = kino::load_scene(bench_scene);
      kino::BenchSpec spec;
      spec.method = parse_method(bench_method);
      spec.runs = bench_runs;
      spec.base_seed = bench_seed;
      spec.max_iterations = bench_iters;
      spec.metric = parse_metric(bench_metric);
      spec.resolution = bench_res;
      spec.shortcut.stall_window = bench_window;
      spec.shortcut.stall_epsilon = bench_eps;
      spec.rrt_step = bench_step;
      spec.rrt_max_iterations = bench_rrt_iters;
      spec.threads = bench_threads;
      if (bench_timing == "none")
        spec.record_wall_time = false;
      else if (bench_timing != "wall")
        throw std::invalid_argument("--timing must be wall or none");

      if (bench_preset == "regular-polygon") {
        const auto* chain = std::get_if<kino::PlanarChain>(&scene.robot);
        if (!chain)
          throw std::invalid_argument(
              "--preset regular-polygon needs a chain-robot scene");
        spec.x_init = kino::PhaseStateN::at_rest(
            regular_polygon_config(chain->links, false));
        spec.x_goal = kino::PhaseStateN::at_rest(
            regular_polygon_config(chain->links, true));
      } else if (!bench_preset.empty()) {
        throw std::invalid_argument("unknown preset: " + bench_preset);
      } else {
        if (bench_start.empty() || bench_goal.empty())
          throw std::invalid_argument("bench needs --start/--goal or --preset");
        spec.x_init = parse_state(bench_start);
        spec.x_goal = parse_state(bench_goal);
      }

      const kino::BenchStats stats = kino::run_bench(scene, spec);
      const std::string csv = kino::bench_csv(stats);
      if (!bench_out.empty())
        write_text(bench_out, csv);
      else
        std::fputs(csv.c_str(), stdout);
      std::printf("# method=%s solved=%d/%zu\n", method_name(spec.method),
                  stats.solved_count, stats.rows.size());
      std::printf("# runtime_s mean=%.9g median=%.9g stddev=%.9g\n",
                  stats.runtime.mean, stats.runtime.median,
                  stats.runtime.stddev);
      std::printf("# nodes mean=%.9g median=%.9g stddev=%.9g\n",
                  stats.nodes.mean, stats.nodes.median, stats.nodes.stddev);
      std::printf("# collision_checks mean=%.9g median=%.9g stddev=%.9g\n",
                  stats.checks.mean, stats.checks.median, stats.checks.stddev);
      std::printf("# traj_time mean=%.9g median=%.9g stddev=%.9g\n",
                  stats.traj_time.mean, stats.traj_time.median,
                  stats.traj_time.stddev);
      return stats.solved_count == bench_runs ? 0 : 1;
    }

    if (*render) {
      const kino::Scene scene = kino::load_scene(render_scene);
      kino::RenderArtifacts art;
      for (const auto& path : render_trajs)
        art.trajectories.push_back(
            kino::trajectory_from_json(kino::load_json(path)));
      kino::RenderMode mode;
      if (render_mode == "phase") {
        mode.kind = kino::RenderMode::kPhase;
        mode.axis = render_axis;
      } else if (render_mode != "workspace") {
        throw std::invalid_argument("--mode must be workspace or phase");
      }
      write_text(render_out, kino::render_svg(scene, art, mode));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  return 0;
}
