#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "kino/geometry.hpp"
#include "kino/phase.hpp"
#include "kino/trajectory.hpp"

namespace kino {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const {
    return v >= lo - tol && v <= hi + tol;
  }
  double width() const { return hi - lo; }
};

/// Planar vehicle (disc; radius 0 = point) moving in the 2D workspace.
struct PlanarPoint {
  double radius = 0.0;
};

/// Fixed-base planar kinematic chain of equal-length links; configuration
/// is the vector of relative joint angles.
struct PlanarChain {
  int links = 0;
  double link_length = 1.0;
  Vec2 base{0.0, 0.0};
  double joint_limit = std::numbers::pi;
};

using RobotModel = std::variant<PlanarPoint, PlanarChain>;

struct Scene {
  std::vector<Interval> q_bounds;
  std::vector<Interval> v_bounds;
  std::vector<AccelBounds> accel;
  std::vector<Polygon> obstacles;
  RobotModel robot = PlanarPoint{};
  bool chain_self_collision = false;
  // When false, v_bounds only constrain sampling; trajectories may exceed
  // them mid-edge. Steered arcs between far-apart states peak well above
  // the sampling box, so benchmark scenes typically disable enforcement.
  bool enforce_velocity_bounds = true;
  double resolution = 4.0;  // default collision-check spacing in q units

  std::size_t dims() const { return q_bounds.size(); }

  void validate() const {
    const std::size_t n = dims();
    if (n == 0) throw std::invalid_argument("scene: zero dimensions");
    if (v_bounds.size() != n || accel.size() != n)
      throw std::invalid_argument("scene: bounds dimension mismatch");
    for (const auto& b : q_bounds)
      if (!(b.lo <= b.hi)) throw std::invalid_argument("scene: empty q_bound");
    for (const auto& b : v_bounds)
      if (!(b.lo <= b.hi)) throw std::invalid_argument("scene: empty v_bound");
    for (const auto& a : accel)
      if (!a.valid())
        throw std::invalid_argument(
            "scene: accel bounds must satisfy a_min < 0 < a_max");
    for (const auto& poly : obstacles)
      if (!polygon_is_simple(poly))
        throw std::invalid_argument(
            "scene: obstacle polygons need >= 3 vertices and no "
            "self-intersection");
    if (const auto* chain = std::get_if<PlanarChain>(&robot)) {
      if (chain->links <= 0 || chain->link_length <= 0.0)
        throw std::invalid_argument("scene: bad chain geometry");
      if (static_cast<std::size_t>(chain->links) != n)
        throw std::invalid_argument("scene: chain links != dimensions");
    }
    if (!(resolution > 0.0))
      throw std::invalid_argument("scene: resolution must be positive");
  }
};

/// Forward kinematics: workspace segments of each link under cumulative
/// joint angles from the fixed base.
inline std::vector<Segment2> fk_chain(const PlanarChain& chain,
                                      const std::vector<double>& q) {
  if (static_cast<int>(q.size()) != chain.links)
    throw std::invalid_argument("fk_chain: dimension mismatch");
  std::vector<Segment2> segs;
  segs.reserve(q.size());
  Vec2 p = chain.base;
  double angle = 0.0;
  for (double qi : q) {
    angle += qi;
    const Vec2 next = p + chain.link_length * Vec2{std::cos(angle),
                                                   std::sin(angle)};
    segs.push_back({p, next});
    p = next;
  }
  return segs;
}

/// Configuration-level freedom: inside q_bounds and not intersecting any
/// obstacle. Naive scan over all obstacle edges.
inline bool config_free(const Scene& scene, const std::vector<double>& q) {
  if (q.size() != scene.dims()) return false;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!scene.q_bounds[i].contains(q[i])) return false;

  if (const auto* pt = std::get_if<PlanarPoint>(&scene.robot)) {
    const Vec2 p{q[0], q.size() > 1 ? q[1] : 0.0};
    for (const auto& poly : scene.obstacles)
      if (disc_hits_polygon(p, pt->radius, poly)) return false;
    return true;
  }

  const auto& chain = std::get<PlanarChain>(scene.robot);
  const auto segs = fk_chain(chain, q);
  for (const auto& s : segs)
    for (const auto& poly : scene.obstacles)
      if (segment_hits_polygon(s.a, s.b, poly)) return false;
  if (scene.chain_self_collision) {
    for (std::size_t i = 0; i < segs.size(); ++i)
      for (std::size_t j = i + 2; j < segs.size(); ++j)
        if (segments_intersect(segs[i].a, segs[i].b, segs[j].a, segs[j].b))
          return false;
  }
  return true;
}

struct CollisionReport {
  bool free = true;
  std::optional<double> first_hit_time;
  std::int64_t checks_performed = 0;
};

namespace detail {

inline double accel_at(const PiecewiseControl1& c, double t) {
  for (const auto& s : c.segments) {
    if (t < s.duration) return s.accel;
    t -= s.duration;
  }
  return c.segments.empty() ? 0.0 : c.segments.back().accel;
}

/// Sample times for walking a trajectory: every axis switch time plus
/// adaptive steps sized so no axis moves more than `resolution` between
/// consecutive samples. Within a step the displacement is bounded by
/// |v| dt + |a| dt^2 / 2, which stays valid at zero speed.
inline std::vector<double> collision_sample_times(const TrajectoryN& traj,
                                                  double resolution) {
  std::vector<double> boundaries{0.0, traj.duration};
  for (const auto& axis : traj.axes) {
    double t = 0.0;
    for (const auto& s : axis.segments) {
      t += s.duration;
      if (t > 0.0 && t < traj.duration) boundaries.push_back(t);
    }
  }
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()),
                   boundaries.end());

  std::vector<double> times;
  times.reserve(boundaries.size() * 4);
  std::vector<double> accels(traj.axes.size());
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    double t = boundaries[k];
    const double end = boundaries[k + 1];
    // Accelerations are constant on a boundary interval.
    const double tm = 0.5 * (t + end);
    for (std::size_t i = 0; i < traj.axes.size(); ++i)
      accels[i] = std::abs(accel_at(traj.axes[i], tm));
    times.push_back(t);
    while (t < end) {
      const PhaseStateN x = evaluate(traj, t);
      double dt = end - t;
      for (std::size_t i = 0; i < x.qd.size(); ++i) {
        const double v = std::abs(x.qd[i]);
        const double a = accels[i];
        const double step =
            a > 1e-12
                ? (std::sqrt(v * v + 2.0 * a * resolution) - v) / a
                : (v > 1e-12 ? resolution / v : end - t);
        dt = std::min(dt, step);
      }
      dt = std::max(dt, 1e-9);
      t += dt;
      if (t < end) times.push_back(t);
    }
  }
  times.push_back(traj.duration);
  return times;
}

}  // namespace detail

/// Walks the trajectory checking configuration freedom and velocity and
/// position bounds. The state space is a box, so out-of-bound samples are
/// treated the same as obstacle hits. `reversed_frame` flips velocities
/// before the bound test (used for goal-tree edges grown in reversed
/// time).
inline CollisionReport trajectory_free(const Scene& scene,
                                       const TrajectoryN& traj,
                                       double resolution,
                                       bool reversed_frame = false) {
  if (!(resolution > 0.0))
    throw std::invalid_argument("trajectory_free: resolution must be > 0");
  CollisionReport report;
  const auto times = detail::collision_sample_times(traj, resolution);
  for (double t : times) {
    const PhaseStateN x = evaluate(traj, t);
    ++report.checks_performed;
    bool ok = true;
    if (scene.enforce_velocity_bounds) {
      for (std::size_t i = 0; i < x.qd.size() && ok; ++i) {
        const double v = reversed_frame ? -x.qd[i] : x.qd[i];
        ok = scene.v_bounds[i].contains(v, 1e-9);
      }
    }
    if (ok) ok = config_free(scene, x.q);
    if (!ok) {
      report.free = false;
      report.first_hit_time = t;
      return report;
    }
  }
  return report;
}

}  // namespace kino
