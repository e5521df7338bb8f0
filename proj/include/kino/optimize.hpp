#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kino/planners.hpp"
#include "kino/rng.hpp"
#include "kino/steering.hpp"
#include "kino/trajectory.hpp"
#include "kino/world.hpp"

namespace kino {

enum class IntervalRule { kRandomCoin, kHalton };

struct ShortcutConfig {
  int max_iterations = 2000;
  int stall_window = 200;       // stop after this many attempts without a
  double stall_epsilon = 0.1;   // single improvement larger than epsilon
  std::uint64_t seed = 0;
  double collision_resolution = 0.0;  // 0 = scene default
  IntervalRule rule = IntervalRule::kRandomCoin;
};

struct OptimizeRecord {
  double t1 = 0.0;
  double t2 = 0.0;
  bool accepted = false;
  double new_duration = 0.0;
};

struct OptimizeTrace {
  std::vector<OptimizeRecord> iterations;
  std::int64_t collision_checks = 0;
};

/// Attempts to replace traj on [t1, t2] with the time-optimal bang-bang
/// alternative. Succeeds only when the replacement is strictly faster and
/// passes fresh collision checking; otherwise returns nullopt.
inline std::optional<TrajectoryN> shortcut_step(
    const Scene& scene, const TrajectoryN& traj, double t1, double t2,
    const std::vector<AccelBounds>& bounds, double resolution,
    std::int64_t* checks = nullptr) {
  if (!(t1 >= 0.0 && t1 < t2 && t2 <= traj.duration + 1e-12))
    throw std::invalid_argument("shortcut_step: bad interval");
  const PhaseStateN a = evaluate(traj, t1);
  const PhaseStateN b = evaluate(traj, t2);
  const SteeringPlanN plan = steer_nd(a, b, bounds);
  if (plan.arrival_time >= (t2 - t1) - 1e-12) return std::nullopt;
  const TrajectoryN mid = make_trajectory(a, plan);
  const CollisionReport rep = trajectory_free(scene, mid, resolution);
  if (checks) *checks += rep.checks_performed;
  if (!rep.free) return std::nullopt;
  return splice(traj, t1, t2, mid);
}

/// Draws a shortcut interval. Ordered draws are used as-is; inverted draws
/// fall back, on a fair coin, to one of the end-anchored intervals
/// (0, t2) or (t1, t_F), which concentrates work near the trajectory ends
/// while keeping the interval distribution dense in the whole triangle.
inline std::pair<double, double> pick_interval(Rng& rng, double t_final) {
  if (!(t_final > 0.0))
    throw std::invalid_argument("pick_interval: t_final must be positive");
  const double t1 = rng.uniform(0.0, t_final);
  const double t2 = rng.uniform(0.0, t_final);
  if (t1 < t2) return {t1, t2};
  return rng.coin() ? std::make_pair(0.0, t2) : std::make_pair(t1, t_final);
}

namespace detail {

/// Deterministic alternative: Halton points (bases 2 and 3) folded into
/// the ordered triangle.
inline std::pair<double, double> halton_interval(int index, double t_final) {
  auto halton = [](int i, int base) {
    double f = 1.0, r = 0.0;
    for (int k = i + 1; k > 0; k /= base) {
      f /= base;
      r += f * (k % base);
    }
    return r;
  };
  double u = halton(index, 2) * t_final;
  double v = halton(index, 3) * t_final;
  if (u > v) std::swap(u, v);
  return {u, v};
}

}  // namespace detail

/// Iterative bang-bang shortcut optimization. Repeatedly replaces random
/// sections with time-optimal steers; terminates after max_iterations or
/// once no accepted step has improved the duration by more than
/// stall_epsilon within the last stall_window attempts.
inline std::pair<TrajectoryN, OptimizeTrace> optimize_trajectory(
    const Scene& scene, const TrajectoryN& traj, const ShortcutConfig& cfg) {
  const double resolution = cfg.collision_resolution > 0.0
                                ? cfg.collision_resolution
                                : scene.resolution;
  OptimizeTrace trace;
  {
    const CollisionReport rep = trajectory_free(scene, traj, resolution);
    trace.collision_checks += rep.checks_performed;
    if (!rep.free)
      throw std::invalid_argument("optimize_trajectory: input in collision");
  }

  // Accepted middles are checked at the working resolution; the final
  // trajectory must additionally pass a 10x finer confirmation. If a
  // shallow graze slipped through, the whole pass reruns at the finer
  // resolution; if even that fails, the input is returned unchanged.
  for (int attempt = 0; attempt < 2; ++attempt) {
    const double res = attempt == 0 ? resolution : resolution / 10.0;
    TrajectoryN current = traj;
    Rng rng(cfg.seed);
    std::vector<OptimizeRecord> records;
    int since_improvement = 0;
    for (int i = 0; i < cfg.max_iterations; ++i) {
      if (since_improvement >= cfg.stall_window) break;
      ++since_improvement;
      if (current.duration <= 1e-12) break;

      const auto [t1, t2] =
          cfg.rule == IntervalRule::kRandomCoin
              ? pick_interval(rng, current.duration)
              : detail::halton_interval(i, current.duration);
      OptimizeRecord rec;
      rec.t1 = t1;
      rec.t2 = t2;
      rec.new_duration = current.duration;
      if (t2 - t1 > 1e-12) {
        if (auto next = shortcut_step(scene, current, t1, t2, scene.accel,
                                      res, &trace.collision_checks)) {
          const double gain = current.duration - next->duration;
          current = std::move(*next);
          rec.accepted = true;
          rec.new_duration = current.duration;
          if (gain > cfg.stall_epsilon) since_improvement = 0;
        }
      }
      records.push_back(rec);
    }

    const CollisionReport verify =
        trajectory_free(scene, current, res / 10.0);
    trace.collision_checks += verify.checks_performed;
    if (verify.free) {
      trace.iterations = std::move(records);
      return {std::move(current), std::move(trace)};
    }
  }
  return {traj, std::move(trace)};
}

/// Rest-to-rest lifting of a piecewise-linear configuration path.
///
/// Each edge runs a symmetric bang pair ((a, t), (-a, t)) with the
/// acceleration vector parallel to the edge, so the motion stays on the
/// segment and stops at every vertex. Per axis the admissible symmetric
/// magnitude is min(a_max, -a_min); the binding axis saturates it, which
/// is time-optimal along the segment. Zero-length edges are skipped.
inline TrajectoryN bang_bang_transform(
    const std::vector<std::vector<double>>& path,
    const std::vector<AccelBounds>& bounds) {
  if (path.empty())
    throw std::invalid_argument("bang_bang_transform: empty path");
  const std::size_t n = path.front().size();
  if (bounds.size() != n)
    throw std::invalid_argument("bang_bang_transform: dimension mismatch");

  TrajectoryN traj;
  traj.x0 = PhaseStateN::at_rest(path.front());
  traj.axes.resize(n);
  traj.duration = 0.0;

  for (std::size_t e = 0; e + 1 < path.size(); ++e) {
    const auto& q0 = path[e];
    const auto& q1 = path[e + 1];
    // Binding ratio: the axis maximizing |v_i| / m_i sets the edge time.
    double ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      ratio = std::max(ratio,
                       std::abs(q1[i] - q0[i]) / bounds[i].symmetric_cap());
    if (ratio <= 0.0) continue;  // zero-length edge
    const double t = std::sqrt(ratio);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = (q1[i] - q0[i]) / ratio;  // a * t^2 = displacement
      traj.axes[i].segments.push_back({a, t});
      traj.axes[i].segments.push_back({-a, t});
    }
    traj.duration += 2.0 * t;
  }
  return traj;
}

struct LiftConfig {
  double rrt_step = 0.0;       // 0 = scene resolution
  int rrt_max_iterations = 100000;
  std::uint64_t seed = 0;
};

struct LiftResult {
  PlanResult plan;
  double raw_duration = 0.0;   // lifted trajectory time before optimization
  int path_vertices = 0;
  std::vector<std::vector<double>> path;
};

/// Plan-then-optimize pipeline for rest-to-rest queries: RRT-Connect on
/// the configuration space, bang-bang lift, iterative shortcut
/// optimization.
inline LiftResult lift_and_optimize(const Scene& scene,
                                    const std::vector<double>& q_init,
                                    const std::vector<double>& q_goal,
                                    const LiftConfig& lift_cfg,
                                    const ShortcutConfig& shortcut_cfg) {
  LiftResult out;
  const double step =
      lift_cfg.rrt_step > 0.0 ? lift_cfg.rrt_step : scene.resolution;
  GeoPlanResult geo =
      rrt_connect_geometric(scene, q_init, q_goal, step, lift_cfg.seed,
                            lift_cfg.rrt_max_iterations);
  out.plan.stats.iterations = geo.iterations;
  out.plan.stats.nodes = geo.nodes;
  out.plan.stats.collision_checks = geo.collision_checks;
  out.plan.stats.wall_time_s = geo.wall_time_s;
  if (!geo.solved()) {
    out.plan.outcome = PlanResult::Outcome::kFailure;
    return out;
  }
  out.path = *geo.path;
  out.path_vertices = static_cast<int>(out.path.size());

  const auto t_begin = std::chrono::steady_clock::now();
  TrajectoryN lifted = bang_bang_transform(out.path, scene.accel);
  out.raw_duration = lifted.duration;

  auto [optimized, trace] = optimize_trajectory(scene, lifted, shortcut_cfg);
  out.plan.outcome = PlanResult::Outcome::kSolution;
  out.plan.trajectory = std::move(optimized);
  out.plan.stats.collision_checks += trace.collision_checks;
  out.plan.stats.traj_time = out.plan.trajectory->duration;
  out.plan.stats.wall_time_s +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return out;
}

}  // namespace kino
