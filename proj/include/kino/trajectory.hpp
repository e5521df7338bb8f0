#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kino/phase.hpp"
#include "kino/steering.hpp"

namespace kino {

/// A closed-form trajectory for n double integrators: an initial state
/// plus one piecewise-constant control per axis. Axes keep independent
/// segment lists (their switch times differ); every axis's durations sum
/// to `duration`.
struct TrajectoryN {
  PhaseStateN x0;
  std::vector<PiecewiseControl1> axes;
  double duration = 0.0;

  std::size_t dims() const { return x0.dims(); }
};

inline TrajectoryN make_trajectory(const PhaseStateN& x0,
                                   const SteeringPlanN& plan) {
  TrajectoryN t;
  t.x0 = x0;
  t.axes = plan.per_axis;
  t.duration = plan.arrival_time;
  return t;
}

/// State at time t, evaluated in closed form per axis.
inline PhaseStateN evaluate(const TrajectoryN& traj, double t,
                            double slack = 1e-9) {
  if (t < -slack || t > traj.duration + slack)
    throw std::out_of_range("evaluate: t outside [0, duration]");
  t = std::clamp(t, 0.0, traj.duration);
  PhaseStateN out = traj.x0;
  for (std::size_t i = 0; i < traj.axes.size(); ++i)
    out.set_axis(i, traj.axes[i].at(traj.x0.axis(i), t, slack + 1e-9));
  return out;
}

inline PhaseStateN end_state(const TrajectoryN& traj) {
  PhaseStateN out = traj.x0;
  for (std::size_t i = 0; i < traj.axes.size(); ++i)
    out.set_axis(i, traj.axes[i].end_state(traj.x0.axis(i)));
  return out;
}

/// Restriction of traj to [t1, t2], re-rooted at evaluate(traj, t1).
/// Segments are clipped at the interval ends; interior switch times are
/// preserved exactly.
inline TrajectoryN restrict(const TrajectoryN& traj, double t1, double t2,
                            double slack = 1e-9) {
  if (!(t1 >= -slack && t2 >= t1 - slack && t2 <= traj.duration + slack))
    throw std::out_of_range("restrict: bad interval");
  t1 = std::clamp(t1, 0.0, traj.duration);
  t2 = std::clamp(t2, t1, traj.duration);

  TrajectoryN out;
  out.x0 = evaluate(traj, t1);
  out.duration = t2 - t1;
  out.axes.resize(traj.axes.size());
  for (std::size_t i = 0; i < traj.axes.size(); ++i) {
    auto& dst = out.axes[i].segments;
    double begin = 0.0;  // start time of the current source segment
    for (const auto& s : traj.axes[i].segments) {
      const double end = begin + s.duration;
      const double lo = std::max(begin, t1);
      const double hi = std::min(end, t2);
      if (hi > lo) dst.push_back({s.accel, hi - lo});
      begin = end;
    }
    // Absorb clipping roundoff so axis durations match exactly.
    double sum = 0.0;
    for (const auto& s : dst) sum += s.duration;
    const double defect = out.duration - sum;
    if (dst.empty())
      dst.push_back({0.0, out.duration});
    else
      dst.back().duration = std::max(0.0, dst.back().duration + defect);
  }
  return out;
}

/// Concatenation of two trajectories whose junction states agree.
inline TrajectoryN concat(const TrajectoryN& a, const TrajectoryN& b,
                          double tol = 1e-9) {
  if (a.dims() != b.dims())
    throw std::invalid_argument("concat: dimension mismatch");
  if (max_abs_diff(end_state(a), b.x0) > tol)
    throw std::invalid_argument("concat: junction state mismatch");
  TrajectoryN out = a;
  for (std::size_t i = 0; i < out.axes.size(); ++i)
    out.axes[i].append(b.axes[i]);
  out.duration += b.duration;
  return out;
}

/// Replaces traj on [t1, t2] with `mid`, whose endpoints must match
/// evaluate(traj, t1) and evaluate(traj, t2) within tol.
inline TrajectoryN splice(const TrajectoryN& traj, double t1, double t2,
                          const TrajectoryN& mid, double tol = 1e-9) {
  const PhaseStateN at1 = evaluate(traj, t1);
  const PhaseStateN at2 = evaluate(traj, t2);
  if (max_abs_diff(mid.x0, at1) > tol ||
      max_abs_diff(end_state(mid), at2) > tol)
    throw std::invalid_argument("splice: endpoint mismatch");
  TrajectoryN head = restrict(traj, 0.0, t1);
  TrajectoryN tail = restrict(traj, t2, traj.duration);
  return concat(concat(head, mid, tol), tail, tol);
}

/// Time reversal: runs the motion backwards. States map (q, qd) to
/// (q, -qd); each axis's segment order flips while accelerations keep
/// their values, so the same bounds admit the reversed control.
inline TrajectoryN reverse(const TrajectoryN& traj) {
  TrajectoryN out;
  out.x0 = end_state(traj).reversed();
  out.duration = traj.duration;
  out.axes.resize(traj.axes.size());
  for (std::size_t i = 0; i < traj.axes.size(); ++i) {
    auto segs = traj.axes[i].segments;
    std::reverse(segs.begin(), segs.end());
    out.axes[i].segments = std::move(segs);
  }
  return out;
}

}  // namespace kino
