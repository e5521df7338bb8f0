#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kino/phase.hpp"
#include "kino/rng.hpp"
#include "kino/steering.hpp"
#include "kino/trajectory.hpp"
#include "kino/world.hpp"

namespace kino {

enum class Metric { kRho1, kRho2 };

struct PlanQuery {
  PhaseStateN x_init;
  PhaseStateN x_goal;
  int max_iterations = 10000;
  std::uint64_t seed = 0;
  Metric metric = Metric::kRho1;
  double resolution = 0.0;      // 0 = use scene default
  int node_insert_every = 12;   // intermediate tree node per this many checks
  bool capture_tree_edges = false;
};

struct PlanStats {
  int iterations = 0;
  int nodes = 0;
  std::int64_t collision_checks = 0;
  double wall_time_s = 0.0;
  double traj_time = 0.0;
  double connect_gap_q = 0.0;   // baseline planner junction gap
  double connect_gap_qd = 0.0;
};

struct PlanResult {
  enum class Outcome { kSolution, kFailure };
  Outcome outcome = Outcome::kFailure;
  std::optional<TrajectoryN> trajectory;
  PlanStats stats;
  // Workspace polylines of tree edges (first two axes), when captured.
  std::vector<std::vector<Vec2>> tree_edges;

  bool solved() const { return outcome == Outcome::kSolution; }
};

inline double metric_time(Metric m, const PhaseStateN& from,
                          const PhaseStateN& to,
                          const std::vector<AccelBounds>& bounds) {
  return m == Metric::kRho1 ? rho1(from, to, bounds) : rho2(from, to, bounds);
}

/// Linear-scan nearest neighbor under the bang-bang quasimetric, measured
/// from each candidate point to the target. Ties keep the lowest index.
inline std::size_t bb_nearest_index(const std::vector<PhaseStateN>& points,
                                    const PhaseStateN& target, Metric metric,
                                    const std::vector<AccelBounds>& bounds) {
  if (points.empty())
    throw std::invalid_argument("bb_nearest: empty point set");
  std::size_t best = 0;
  double best_d = metric_time(metric, points[0], target, bounds);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = metric_time(metric, points[i], target, bounds);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline PhaseStateN bb_nearest(const std::vector<PhaseStateN>& points,
                              const PhaseStateN& target, Metric metric,
                              const std::vector<AccelBounds>& bounds) {
  return points[bb_nearest_index(points, target, metric, bounds)];
}

struct SteerOutcome {
  PhaseStateN reached;
  TrajectoryN trajectory;
  bool reached_target = false;
  std::int64_t checks = 0;
  std::vector<double> check_times;  // collision-free sample times kept
};

/// Steers from `from` toward `to`, walking the trajectory with collision
/// checks. Stops at the last collision-free checked sample when blocked;
/// reaches `to` exactly otherwise.
inline SteerOutcome bb_steer_checked(const Scene& scene,
                                     const PhaseStateN& from,
                                     const PhaseStateN& to,
                                     const std::vector<AccelBounds>& bounds,
                                     double resolution,
                                     bool reversed_frame = false) {
  SteerOutcome out;
  const SteeringPlanN plan = steer_nd(from, to, bounds);
  const TrajectoryN traj = make_trajectory(from, plan);

  if (traj.duration <= 0.0) {
    out.reached = from;
    out.trajectory = traj;
    out.reached_target = max_abs_diff(from, to) == 0.0;
    return out;
  }

  const auto times = detail::collision_sample_times(traj, resolution);
  std::size_t free_upto = 0;  // number of leading samples confirmed free
  for (std::size_t k = 0; k < times.size(); ++k) {
    const PhaseStateN x = evaluate(traj, times[k]);
    ++out.checks;
    bool ok = true;
    if (scene.enforce_velocity_bounds) {
      for (std::size_t i = 0; i < x.qd.size() && ok; ++i) {
        const double v = reversed_frame ? -x.qd[i] : x.qd[i];
        ok = scene.v_bounds[i].contains(v, 1e-9);
      }
    }
    if (ok) ok = config_free(scene, x.q);
    if (!ok) break;
    out.check_times.push_back(times[k]);
    free_upto = k + 1;
  }

  if (free_upto == times.size()) {
    out.trajectory = traj;
    out.reached = to;  // steering is exact
    out.reached_target = true;
  } else if (free_upto == 0) {
    out.trajectory = restrict(traj, 0.0, 0.0);
    out.reached = from;
  } else {
    const double t_prefix = times[free_upto - 1];
    out.trajectory = restrict(traj, 0.0, t_prefix);
    out.reached = end_state(out.trajectory);
  }
  return out;
}

namespace detail {

struct TreeNode {
  PhaseStateN state;
  int parent = -1;
  std::vector<PiecewiseControl1> edge_axes;  // control from parent
  double edge_duration = 0.0;
};

/// One RRT tree. The goal tree stores states and edges in time-reversed
/// coordinates ((q, qd) -> (q, -qd), same acceleration bounds), so growth
/// and nearest-neighbor logic are identical for both trees.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<PhaseStateN> states;  // mirrors nodes for nearest scans
  bool reversed = false;

  void init(const PhaseStateN& root, bool rev) {
    nodes.clear();
    states.clear();
    reversed = rev;
    nodes.push_back({root, -1, {}, 0.0});
    states.push_back(root);
  }

  PhaseStateN to_frame(const PhaseStateN& world) const {
    return reversed ? world.reversed() : world;
  }
  PhaseStateN from_frame(const PhaseStateN& x) const {
    return reversed ? x.reversed() : x;
  }

  int size() const { return static_cast<int>(nodes.size()); }

  int add(int parent, const PhaseStateN& state, const TrajectoryN& edge) {
    nodes.push_back({state, parent, edge.axes, edge.duration});
    states.push_back(state);
    return size() - 1;
  }

  /// Adds the steered edge, inserting an intermediate node every
  /// `insert_every` collision checks; returns the final node index.
  int add_chain(int parent, const SteerOutcome& steer, int insert_every) {
    std::vector<double> cut_times;
    if (insert_every > 0) {
      for (std::size_t k = insert_every;
           k + 1 < steer.check_times.size();
           k += static_cast<std::size_t>(insert_every)) {
        const double t = steer.check_times[k];
        if (t > 0.0 && t < steer.trajectory.duration) cut_times.push_back(t);
      }
    }
    cut_times.push_back(steer.trajectory.duration);

    int idx = parent;
    double prev = 0.0;
    for (double t : cut_times) {
      if (!(t > prev)) continue;
      TrajectoryN piece = restrict(steer.trajectory, prev, t);
      PhaseStateN state = end_state(piece);
      if (t == steer.trajectory.duration) state = steer.reached;
      idx = add(idx, state, piece);
      prev = t;
    }
    return idx;
  }

  /// Trajectory from the root to node `idx`, in tree-frame coordinates.
  TrajectoryN chain_trajectory(int idx) const {
    std::vector<int> path;
    for (int i = idx; i >= 0; i = nodes[i].parent) path.push_back(i);
    TrajectoryN traj;
    traj.x0 = nodes[path.back()].state;
    traj.duration = 0.0;
    traj.axes.resize(traj.x0.dims());
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const TreeNode& node = nodes[*it];
      if (node.parent < 0) continue;
      for (std::size_t a = 0; a < traj.axes.size(); ++a)
        traj.axes[a].append(node.edge_axes[a]);
      traj.duration += node.edge_duration;
    }
    return traj;
  }
};

inline std::vector<Vec2> edge_polyline(const TrajectoryN& edge,
                                       int samples = 16) {
  std::vector<Vec2> pts;
  if (edge.dims() < 2) return pts;
  pts.reserve(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    const PhaseStateN x = evaluate(edge, edge.duration * k / samples);
    pts.push_back({x.q[0], x.q[1]});
  }
  return pts;
}

inline PhaseStateN sample_state(const Scene& scene, Rng& rng) {
  const std::size_t n = scene.dims();
  PhaseStateN x = PhaseStateN::zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    x.q[i] = rng.uniform(scene.q_bounds[i].lo, scene.q_bounds[i].hi);
  for (std::size_t i = 0; i < n; ++i)
    x.qd[i] = rng.uniform(scene.v_bounds[i].lo, scene.v_bounds[i].hi);
  return x;
}

inline bool state_valid(const Scene& scene, const PhaseStateN& x) {
  for (std::size_t i = 0; i < x.qd.size(); ++i)
    if (!scene.v_bounds[i].contains(x.qd[i], 1e-9)) return false;
  return config_free(scene, x.q);
}

}  // namespace detail

/// Bidirectional RRT with bang-bang steering and quasimetric.
///
/// Both trees grow with exact time-optimal steering; the goal tree grows
/// in reversed time so that the concatenated solution executes forward.
/// The trees swap roles whenever the connecting tree outgrows the
/// exploring tree.
inline PlanResult bb_rrt_bidirectional(const Scene& scene,
                                       const PlanQuery& query) {
  scene.validate();
  const std::size_t n = scene.dims();
  if (query.x_init.dims() != n || query.x_goal.dims() != n)
    throw std::invalid_argument("bb_rrt: query dimension mismatch");
  if (!detail::state_valid(scene, query.x_init) ||
      !detail::state_valid(scene, query.x_goal))
    throw std::invalid_argument("bb_rrt: start or goal state is not free");

  const double resolution =
      query.resolution > 0.0 ? query.resolution : scene.resolution;
  const auto& bounds = scene.accel;

  PlanResult result;
  const auto t_begin = std::chrono::steady_clock::now();
  auto finish = [&](PlanResult::Outcome outcome, int iters,
                    const detail::Tree& a, const detail::Tree& b) {
    result.outcome = outcome;
    result.stats.iterations = iters;
    result.stats.nodes = a.size() + b.size();
    result.stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_begin)
            .count();
    if (result.trajectory)
      result.stats.traj_time = result.trajectory->duration;
  };

  detail::Tree ta, tb;
  ta.init(query.x_init, false);
  tb.init(query.x_goal.reversed(), true);

  if (max_abs_diff(query.x_init, query.x_goal) == 0.0) {
    TrajectoryN zero;
    zero.x0 = query.x_init;
    zero.axes.resize(n);
    result.trajectory = zero;
    finish(PlanResult::Outcome::kSolution, 0, ta, tb);
    return result;
  }

  Rng rng(query.seed);
  auto capture = [&](const detail::Tree& tree, int node_idx) {
    if (!query.capture_tree_edges) return;
    const auto& node = tree.nodes[node_idx];
    if (node.parent < 0) return;
    TrajectoryN edge;
    edge.x0 = tree.nodes[node.parent].state;
    edge.axes = node.edge_axes;
    edge.duration = node.edge_duration;
    auto poly = detail::edge_polyline(edge);
    if (!poly.empty()) result.tree_edges.push_back(std::move(poly));
  };
  auto add_chain_captured = [&](detail::Tree& tree, int parent,
                                const SteerOutcome& steer) {
    const int first_new = tree.size();
    const int idx = tree.add_chain(parent, steer, query.node_insert_every);
    for (int k = first_new; k < tree.size(); ++k) capture(tree, k);
    return idx;
  };

  for (int i = 1; i <= query.max_iterations; ++i) {
    const PhaseStateN alpha = detail::sample_state(scene, rng);

    // Explore: extend tree a toward alpha.
    const PhaseStateN target_a = ta.to_frame(alpha);
    const std::size_t near_a =
        bb_nearest_index(ta.states, target_a, query.metric, bounds);
    const SteerOutcome sa = bb_steer_checked(
        scene, ta.states[near_a], target_a, bounds, resolution, ta.reversed);
    result.stats.collision_checks += sa.checks;

    if (sa.trajectory.duration > 0.0) {
      const int a_node = add_chain_captured(ta, static_cast<int>(near_a), sa);
      const PhaseStateN x_s_world = ta.from_frame(sa.reached);

      // Connect: steer tree b toward the newly reached state.
      const PhaseStateN target_b = tb.to_frame(x_s_world);
      const std::size_t near_b =
          bb_nearest_index(tb.states, target_b, query.metric, bounds);
      const SteerOutcome sb = bb_steer_checked(
          scene, tb.states[near_b], target_b, bounds, resolution, tb.reversed);
      result.stats.collision_checks += sb.checks;

      int b_node = static_cast<int>(near_b);
      if (sb.trajectory.duration > 0.0)
        b_node = add_chain_captured(tb, static_cast<int>(near_b), sb);

      if (sb.reached_target) {
        const detail::Tree& fwd = ta.reversed ? tb : ta;
        const detail::Tree& rev = ta.reversed ? ta : tb;
        const int fwd_node = ta.reversed ? b_node : a_node;
        const int rev_node = ta.reversed ? a_node : b_node;
        TrajectoryN left = fwd.chain_trajectory(fwd_node);
        TrajectoryN right = reverse(rev.chain_trajectory(rev_node));
        TrajectoryN sol = concat(left, right, 1e-6);
        // Edge checks sample at `resolution` and can miss shallow grazes;
        // a solution is only declared after the whole trajectory passes a
        // 10x finer verification. Otherwise keep planning.
        const CollisionReport verify =
            trajectory_free(scene, sol, resolution / 10.0);
        result.stats.collision_checks += verify.checks_performed;
        if (verify.free) {
          result.trajectory = std::move(sol);
          finish(PlanResult::Outcome::kSolution, i, ta, tb);
          return result;
        }
      }
    }
    if (tb.size() > ta.size()) std::swap(ta, tb);
  }
  finish(PlanResult::Outcome::kFailure, query.max_iterations, ta, tb);
  return result;
}

struct BaselineParams {
  int action_count = 24;
  double delta_t = 5.0;
  double connect_dq = 5.0;
  double connect_dqd = 2.0;
  double velocity_weight = 17.32;
};

namespace detail {

inline double weighted_dist2(const PhaseStateN& a, const PhaseStateN& b,
                             double w) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.q.size(); ++i) {
    const double dq = a.q[i] - b.q[i];
    const double dv = w * (a.qd[i] - b.qd[i]);
    d += dq * dq + dv * dv;
  }
  return d;
}

}  // namespace detail

/// Original kinodynamic bidirectional RRT baseline: weighted Euclidean
/// nearest neighbors, a fixed set of constant-acceleration actions applied
/// for delta_t, and threshold-based tree connection. The returned
/// trajectory concatenates the two tree chains; the junction mismatch is
/// reported in stats (connect_gap_q / connect_gap_qd).
inline PlanResult baseline_rrt_bidirectional(const Scene& scene,
                                             const PlanQuery& query,
                                             const BaselineParams& params) {
  scene.validate();
  const std::size_t n = scene.dims();
  if (query.x_init.dims() != n || query.x_goal.dims() != n)
    throw std::invalid_argument("baseline_rrt: query dimension mismatch");
  if (!detail::state_valid(scene, query.x_init) ||
      !detail::state_valid(scene, query.x_goal))
    throw std::invalid_argument("baseline_rrt: start or goal not free");

  const double resolution =
      query.resolution > 0.0 ? query.resolution : scene.resolution;

  // Action set: fixed for a given scene dimension and count.
  std::vector<std::vector<double>> actions;
  {
    auto boundary_scale = [&](const std::vector<double>& dir) {
      double s = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (dir[i] > 0.0) s = std::min(s, scene.accel[i].a_max / dir[i]);
        if (dir[i] < 0.0) s = std::min(s, scene.accel[i].a_min / dir[i]);
      }
      return std::isfinite(s) ? s : 0.0;
    };
    if (n == 2) {
      for (int k = 0; k < params.action_count; ++k) {
        const double th = 2.0 * 3.14159265358979323846 * k /
                          params.action_count;
        std::vector<double> dir{std::cos(th), std::sin(th)};
        const double s = boundary_scale(dir);
        actions.push_back({s * dir[0], s * dir[1]});
      }
    } else {
      Rng dir_rng(20011u);  // fixed: the action set is not seed-dependent
      for (int k = 0; k < params.action_count; ++k) {
        std::vector<double> dir(n);
        double norm2 = 0.0;
        for (auto& d : dir) {
          // Box-Muller from deterministic uniforms.
          const double u1 = std::max(dir_rng.uniform(), 1e-300);
          const double u2 = dir_rng.uniform();
          d = std::sqrt(-2.0 * std::log(u1)) *
              std::cos(2.0 * 3.14159265358979323846 * u2);
          norm2 += d * d;
        }
        if (norm2 <= 0.0) {
          dir.assign(n, 0.0);
          dir[0] = 1.0;
        }
        const double s = boundary_scale(dir);
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = s * dir[i];
        actions.push_back(std::move(a));
      }
    }
  }

  PlanResult result;
  const auto t_begin = std::chrono::steady_clock::now();
  auto finish = [&](PlanResult::Outcome outcome, int iters,
                    const detail::Tree& a, const detail::Tree& b) {
    result.outcome = outcome;
    result.stats.iterations = iters;
    result.stats.nodes = a.size() + b.size();
    result.stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_begin)
            .count();
    if (result.trajectory)
      result.stats.traj_time = result.trajectory->duration;
  };

  detail::Tree ta, tb;
  ta.init(query.x_init, false);
  tb.init(query.x_goal.reversed(), true);

  if (max_abs_diff(query.x_init, query.x_goal) == 0.0) {
    TrajectoryN zero;
    zero.x0 = query.x_init;
    zero.axes.resize(n);
    result.trajectory = zero;
    finish(PlanResult::Outcome::kSolution, 0, ta, tb);
    return result;
  }

  Rng rng(query.seed);

  // Extends `tree` one action step toward `target` (tree frame); returns
  // the new node index or -1 when every action edge collides.
  auto extend = [&](detail::Tree& tree, const PhaseStateN& target) -> int {
    std::size_t near = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tree.states.size(); ++k) {
      const double d = detail::weighted_dist2(tree.states[k], target,
                                              params.velocity_weight);
      if (d < best) {
        best = d;
        near = k;
      }
    }
    const PhaseStateN& from = tree.states[near];

    int best_action = -1;
    double best_d = std::numeric_limits<double>::infinity();
    TrajectoryN best_edge;
    PhaseStateN best_end;
    for (std::size_t ai = 0; ai < actions.size(); ++ai) {
      TrajectoryN edge;
      edge.x0 = from;
      edge.duration = params.delta_t;
      edge.axes.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        edge.axes[i].segments = {{actions[ai][i], params.delta_t}};
      const CollisionReport rep =
          trajectory_free(scene, edge, resolution, tree.reversed);
      result.stats.collision_checks += rep.checks_performed;
      if (!rep.free) continue;
      const PhaseStateN end = end_state(edge);
      const double d =
          detail::weighted_dist2(end, target, params.velocity_weight);
      if (d < best_d) {
        best_d = d;
        best_action = static_cast<int>(ai);
        best_edge = std::move(edge);
        best_end = end;
      }
    }
    if (best_action < 0) return -1;
    return tree.add(static_cast<int>(near), best_end, best_edge);
  };

  for (int i = 1; i <= query.max_iterations; ++i) {
    const PhaseStateN alpha = detail::sample_state(scene, rng);
    const int a_node = extend(ta, ta.to_frame(alpha));
    if (a_node >= 0) {
      const PhaseStateN x_new_world = ta.from_frame(ta.states[a_node]);
      const int b_node = extend(tb, tb.to_frame(x_new_world));
      if (b_node >= 0) {
        const PhaseStateN x_b_world = tb.from_frame(tb.states[b_node]);
        bool connected = true;
        double gap_q = 0.0, gap_v = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          gap_q = std::max(gap_q, std::abs(x_new_world.q[k] - x_b_world.q[k]));
          gap_v =
              std::max(gap_v, std::abs(x_new_world.qd[k] - x_b_world.qd[k]));
        }
        connected = gap_q <= params.connect_dq && gap_v <= params.connect_dqd;
        if (connected) {
          const detail::Tree& fwd = ta.reversed ? tb : ta;
          const detail::Tree& rev = ta.reversed ? ta : tb;
          const int fwd_node = ta.reversed ? b_node : a_node;
          const int rev_node = ta.reversed ? a_node : b_node;
          TrajectoryN left = fwd.chain_trajectory(fwd_node);
          TrajectoryN right = reverse(rev.chain_trajectory(rev_node));
          // Concatenate across the junction gap: controls are appended and
          // replayed from the left chain's end state.
          TrajectoryN sol = left;
          for (std::size_t k = 0; k < n; ++k)
            sol.axes[k].append(right.axes[k]);
          sol.duration += right.duration;
          result.trajectory = std::move(sol);
          result.stats.connect_gap_q = gap_q;
          result.stats.connect_gap_qd = gap_v;
          finish(PlanResult::Outcome::kSolution, i, ta, tb);
          return result;
        }
      }
    }
    if (tb.size() > ta.size()) std::swap(ta, tb);
  }
  finish(PlanResult::Outcome::kFailure, query.max_iterations, ta, tb);
  return result;
}

/// Result of geometric (configuration-space) planning.
struct GeoPlanResult {
  std::optional<std::vector<std::vector<double>>> path;
  int iterations = 0;
  int nodes = 0;
  std::int64_t collision_checks = 0;
  double wall_time_s = 0.0;

  bool solved() const { return path.has_value(); }
};

namespace detail {

struct GeoTree {
  std::vector<std::vector<double>> q;
  std::vector<int> parent;

  void init(const std::vector<double>& root) {
    q = {root};
    parent = {-1};
  }
  int add(int par, std::vector<double> cfg) {
    q.push_back(std::move(cfg));
    parent.push_back(par);
    return static_cast<int>(q.size()) - 1;
  }
  std::vector<std::vector<double>> chain(int idx) const {
    std::vector<std::vector<double>> out;
    for (int i = idx; i >= 0; i = parent[i]) out.push_back(q[i]);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline double euclid2(const std::vector<double>& a,
                      const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

/// Straight configuration-space segment check, sampled every `resolution`.
inline bool segment_free(const Scene& scene, const std::vector<double>& a,
                         const std::vector<double>& b, double resolution,
                         std::int64_t& checks) {
  const double len = std::sqrt(euclid2(a, b));
  const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
  std::vector<double> q(a.size());
  for (int s = 0; s <= steps; ++s) {
    const double u = static_cast<double>(s) / steps;
    for (std::size_t i = 0; i < a.size(); ++i)
      q[i] = a[i] + u * (b[i] - a[i]);
    ++checks;
    if (!config_free(scene, q)) return false;
  }
  return true;
}

}  // namespace detail

/// RRT-Connect on the configuration-space projection (velocities ignored).
/// Returns the collision-free polyline of tree vertices from q_init to
/// q_goal, including every extension step vertex.
inline GeoPlanResult rrt_connect_geometric(const Scene& scene,
                                           const std::vector<double>& q_init,
                                           const std::vector<double>& q_goal,
                                           double step, std::uint64_t seed,
                                           int max_iterations = 10000,
                                           double resolution = 0.0) {
  scene.validate();
  const std::size_t n = scene.dims();
  if (q_init.size() != n || q_goal.size() != n)
    throw std::invalid_argument("rrt_connect: dimension mismatch");
  if (!config_free(scene, q_init) || !config_free(scene, q_goal))
    throw std::invalid_argument("rrt_connect: start or goal not free");
  if (!(step > 0.0)) throw std::invalid_argument("rrt_connect: bad step");
  const double res = resolution > 0.0 ? resolution : scene.resolution;

  GeoPlanResult result;
  const auto t_begin = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_begin)
        .count();
  };

  if (detail::euclid2(q_init, q_goal) == 0.0) {
    result.path = std::vector<std::vector<double>>{q_init};
    result.nodes = 1;
    result.wall_time_s = elapsed();
    return result;
  }

  // Try joining the roots directly before growing any tree.
  if (detail::segment_free(scene, q_init, q_goal, res,
                           result.collision_checks)) {
    result.path = std::vector<std::vector<double>>{q_init, q_goal};
    result.nodes = 2;
    result.wall_time_s = elapsed();
    return result;
  }

  detail::GeoTree ta, tb;
  ta.init(q_init);
  tb.init(q_goal);
  bool swapped = false;  // true when ta is rooted at the goal
  Rng rng(seed);

  enum class Status { kTrapped, kAdvanced, kReached };
  auto extend = [&](detail::GeoTree& tree, const std::vector<double>& target,
                    int& new_idx) -> Status {
    std::size_t near = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tree.q.size(); ++k) {
      const double d = detail::euclid2(tree.q[k], target);
      if (d < best) {
        best = d;
        near = k;
      }
    }
    const auto& from = tree.q[near];
    const double dist = std::sqrt(best);
    std::vector<double> q_new(n);
    const bool reaches = dist <= step;
    if (reaches) {
      q_new = target;
    } else {
      for (std::size_t i = 0; i < n; ++i)
        q_new[i] = from[i] + (target[i] - from[i]) * (step / dist);
    }
    if (!detail::segment_free(scene, from, q_new, res,
                              result.collision_checks))
      return Status::kTrapped;
    new_idx = tree.add(static_cast<int>(near), q_new);
    return reaches ? Status::kReached : Status::kAdvanced;
  };

  for (int i = 1; i <= max_iterations; ++i) {
    std::vector<double> alpha(n);
    for (std::size_t k = 0; k < n; ++k)
      alpha[k] = rng.uniform(scene.q_bounds[k].lo, scene.q_bounds[k].hi);

    int a_idx = -1;
    if (extend(ta, alpha, a_idx) != Status::kTrapped) {
      const auto& q_new = ta.q[a_idx];
      int b_idx = -1;
      Status s = Status::kAdvanced;
      while (s == Status::kAdvanced) s = extend(tb, q_new, b_idx);
      if (s == Status::kReached) {
        auto left = ta.chain(a_idx);   // root_a -> meeting point
        auto right = tb.chain(b_idx);  // root_b -> meeting point
        if (swapped) std::swap(left, right);  // left is now init-rooted
        std::vector<std::vector<double>> path = left;
        path.insert(path.end(), right.rbegin() + 1, right.rend());
        result.path = std::move(path);
        result.iterations = i;
        result.nodes = static_cast<int>(ta.q.size() + tb.q.size());
        result.wall_time_s = elapsed();
        return result;
      }
    }
    std::swap(ta, tb);
    swapped = !swapped;
  }
  result.iterations = max_iterations;
  result.nodes = static_cast<int>(ta.q.size() + tb.q.size());
  result.wall_time_s = elapsed();
  return result;
}

}  // namespace kino
