#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kino/phase.hpp"

namespace kino {

/// q-axis intercept of the constant-acceleration parabola through x:
/// the parabola satisfies q = c + qd^2 / (2 a), so c = q - qd^2 / (2 a).
inline double parabola_intercept(const PhaseState1& x, double accel) {
  if (accel == 0.0)
    throw std::invalid_argument("parabola_intercept: accel must be nonzero");
  return x.q - x.qd * x.qd / (2.0 * accel);
}

namespace detail {

/// One two-segment extremal control that exactly steers xI to xG:
/// accel a1 for t1, then a2 for t2, switching at (q_switch, v_switch).
struct BangCandidate {
  double a1 = 0.0, a2 = 0.0;
  double t1 = 0.0, t2 = 0.0;
  double q_switch = 0.0, v_switch = 0.0;
  double total() const { return t1 + t2; }
};

/// Enumerates the valid two-bang candidates between xI and xG.
///
/// For each ordering of the extremal accelerations, the parabola through
/// xI (accel a1) and the parabola through xG (accel a2) intersect where
///   v^2 = 2 a1 a2 (c_G - c_I) / (a2 - a1),
/// and each sign of v gives timings t1 = (v - qd_I)/a1, t2 = (qd_G - v)/a2.
/// Candidates with a negative timing are dropped; the rest steer exactly.
inline int bang_candidates(const PhaseState1& xI, const PhaseState1& xG,
                           const AccelBounds& b,
                           std::array<BangCandidate, 4>& out) {
  int count = 0;
  const double pairs[2][2] = {{b.a_max, b.a_min}, {b.a_min, b.a_max}};
  for (const auto& pair : pairs) {
    const double a1 = pair[0], a2 = pair[1];
    const double c_i = parabola_intercept(xI, a1);
    const double c_g = parabola_intercept(xG, a2);
    const double vs2 = 2.0 * a1 * a2 * (c_g - c_i) / (a2 - a1);
    const double scale =
        1.0 + std::abs(xI.qd) + std::abs(xG.qd) + std::abs(c_g - c_i);
    if (vs2 < -1e-12 * scale * scale) continue;  // parabolas do not meet
    const double vs_mag = std::sqrt(std::max(vs2, 0.0));
    const int nsigns = vs_mag > 1e-12 * scale ? 2 : 1;
    for (int s = 0; s < nsigns; ++s) {
      const double vs = s == 0 ? vs_mag : -vs_mag;
      double t1 = (vs - xI.qd) / a1;
      double t2 = (xG.qd - vs) / a2;
      const double slack = 1e-10 * (1.0 + std::abs(t1) + std::abs(t2));
      if (t1 < -slack || t2 < -slack) continue;
      BangCandidate c;
      c.a1 = a1;
      c.a2 = a2;
      c.t1 = std::max(t1, 0.0);
      c.t2 = std::max(t2, 0.0);
      c.q_switch = c_i + vs * vs / (2.0 * a1);
      c.v_switch = vs;
      out[count++] = c;
    }
  }
  return count;
}

}  // namespace detail

/// Minimum steering time only; allocation-free. This is the inner loop of
/// the nearest-neighbor quasimetrics.
inline double min_time_1d(const PhaseState1& xI, const PhaseState1& xG,
                          const AccelBounds& b) {
  std::array<detail::BangCandidate, 4> cands;
  const int n = detail::bang_candidates(xI, xG, b, cands);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) best = std::min(best, cands[i].total());
  return best;
}

/// Result of a 1D minimum-time steering query.
struct MinTimeResult {
  PiecewiseControl1 control;  // two segments at extremal accelerations
  double t_star = 0.0;
  PhaseState1 switch_state;
};

/// Minimum-time steering of one double integrator from xI to xG.
///
/// The optimal control has at most two bangs, each at an extremal
/// acceleration. All candidate parabola intersections are enumerated and
/// the fastest one with nonnegative timings is returned; zero-duration
/// segments are kept so the control always has exactly two segments.
inline MinTimeResult min_time_steer_1d(const PhaseState1& xI,
                                       const PhaseState1& xG,
                                       const AccelBounds& b) {
  if (!finite(xI) || !finite(xG))
    throw std::invalid_argument("min_time_steer_1d: non-finite state");
  if (!b.valid())
    throw std::invalid_argument("min_time_steer_1d: bad accel bounds");

  std::array<detail::BangCandidate, 4> cands;
  const int n = detail::bang_candidates(xI, xG, b, cands);
  if (n == 0)  // cannot happen for finite inputs and valid bounds
    throw std::logic_error("min_time_steer_1d: no parabola intersection");

  int best = 0;
  for (int i = 1; i < n; ++i)
    if (cands[i].total() < cands[best].total()) best = i;

  const auto& c = cands[best];
  MinTimeResult r;
  r.control.segments = {{c.a1, c.t1}, {c.a2, c.t2}};
  r.t_star = c.total();
  r.switch_state = {c.q_switch, c.v_switch};
  return r;
}

/// Feasible arrival times for a 1D steering pair: any t >= t_star works
/// except, when a gap is present, times strictly inside
/// (gap.t_limit, gap.t_mirror).
struct GapInterval {
  double t_limit = 0.0;
  double t_mirror = 0.0;
};

struct WaitProfile {
  double t_star = 0.0;
  std::optional<GapInterval> gap;

  bool feasible(double t, double tol = 1e-9) const {
    if (t < t_star - tol) return false;
    if (gap && t > gap->t_limit + tol && t < gap->t_mirror - tol) return false;
    return true;
  }
};

/// Computes t_star and the gap interval (if any) for steering xI to xG.
///
/// When both intersection orderings admit valid trajectories confined to
/// one velocity half-plane, three candidate trajectories exist. The
/// slowest one confined to the starting half-plane gives t_limit, and the
/// detour through the mirrored switching point gives t_mirror; arrival
/// times strictly between them are unreachable.
inline WaitProfile wait_profile_1d(const PhaseState1& xI,
                                   const PhaseState1& xG,
                                   const AccelBounds& b) {
  if (!finite(xI) || !finite(xG))
    throw std::invalid_argument("wait_profile_1d: non-finite state");
  std::array<detail::BangCandidate, 4> cands;
  const int n = detail::bang_candidates(xI, xG, b, cands);
  if (n == 0) throw std::logic_error("wait_profile_1d: no intersection");

  std::array<double, 4> times;
  for (int i = 0; i < n; ++i) times[i] = cands[i].total();
  std::sort(times.begin(), times.begin() + n);

  WaitProfile p;
  p.t_star = times[0];
  if (n >= 3 && times[2] - times[1] > 1e-9)
    p.gap = GapInterval{times[1], times[2]};
  return p;
}

namespace detail {

/// Validates a fixed-time candidate and packages it.
inline std::optional<PiecewiseControl1> try_fixed_time(
    const PhaseState1& xI, const PhaseState1& xG, const AccelBounds& b,
    double t_w, double a1, double t1, double a2) {
  const double tslack = 1e-9 * (1.0 + t_w);
  if (!(t1 >= -tslack && t1 <= t_w + tslack)) return std::nullopt;
  t1 = std::clamp(t1, 0.0, t_w);
  const double t2 = t_w - t1;
  const double aslack = 1e-9 * (1.0 + std::abs(b.a_min) + b.a_max);
  if (!b.contains(a1, aslack) || !b.contains(a2, aslack)) return std::nullopt;
  a1 = std::clamp(a1, b.a_min, b.a_max);
  a2 = std::clamp(a2, b.a_min, b.a_max);

  const PhaseState1 end = advance(advance(xI, a1, t1), a2, t2);
  const double scale = 1.0 + std::abs(xG.q) + std::abs(xG.qd) +
                       std::abs(xI.qd) * t_w + 0.5 * b.a_max * t_w * t_w;
  if (std::abs(end.q - xG.q) > 1e-9 * scale ||
      std::abs(end.qd - xG.qd) > 1e-9 * scale)
    return std::nullopt;

  PiecewiseControl1 c;
  c.segments = {{a1, t1}, {a2, t2}};
  return c;
}

}  // namespace detail

/// Two-segment control reaching xG from xI at exactly time t_w, or nullopt
/// when t_w is below the minimum time or inside the gap interval.
///
/// Among the (usually non-unique) solutions, equal-magnitude opposite
/// bangs with the smaller |a| are preferred; when the bounds cannot
/// accommodate that shape, one of the two accelerations is pinned to an
/// extremal value and the remaining unknowns are solved linearly.
inline std::optional<PiecewiseControl1> fixed_time_steer_1d(
    const PhaseState1& xI, const PhaseState1& xG, const AccelBounds& b,
    double t_w) {
  if (!(t_w > 0.0))
    throw std::invalid_argument("fixed_time_steer_1d: t_w must be positive");
  if (!finite(xI) || !finite(xG))
    throw std::invalid_argument("fixed_time_steer_1d: non-finite state");

  const WaitProfile profile = wait_profile_1d(xI, xG, b);
  if (!profile.feasible(t_w)) return std::nullopt;

  const double P = xG.q - xI.q - xI.qd * t_w;  // position defect
  const double V = xG.qd - xI.qd;              // velocity defect
  const double vscale = 1.0 + std::abs(xI.qd) + std::abs(xG.qd);

  // Opposite bangs of equal magnitude: a for t1, then -a for t2.
  if (std::abs(V) <= 1e-14 * vscale) {
    const double a = 4.0 * P / (t_w * t_w);
    const double t1 = 0.5 * t_w;
    const double a2 = t1 > 0.0 ? (V - a * t1) / (t_w - t1) : -a;
    if (auto c = detail::try_fixed_time(xI, xG, b, t_w, a, t1, a2)) return c;
  } else {
    // t2 solves V t2^2 - 2 P t2 + (P t_w - V t_w^2 / 2) = 0.
    const double disc = P * P - V * P * t_w + 0.5 * V * V * t_w * t_w;
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double r = P + (P >= 0.0 ? sq : -sq);
    const double roots[2] = {r / V,
                             r != 0.0 ? (P * t_w - 0.5 * V * t_w * t_w) / r
                                      : 0.5 * t_w};
    std::optional<PiecewiseControl1> best;
    double best_mag = 0.0;
    for (double t2 : roots) {
      const double denom = t_w - 2.0 * t2;
      if (std::abs(denom) < 1e-300) continue;
      const double a = V / denom;
      if (auto c = detail::try_fixed_time(xI, xG, b, t_w, a, t_w - t2, -a)) {
        if (!best || std::abs(a) < best_mag) {
          best = c;
          best_mag = std::abs(a);
        }
      }
    }
    if (best) return best;
  }

  // First segment pinned to an extremal acceleration.
  for (double a1 : {b.a_max, b.a_min}) {
    const double denom = a1 * t_w - V;
    if (std::abs(denom) < 1e-300) continue;
    const double t1 = (2.0 * P - V * t_w) / denom;
    const double t2 = t_w - t1;
    const double a2 = std::abs(t2) > 1e-300 ? (V - a1 * t1) / t2 : a1;
    if (auto c = detail::try_fixed_time(xI, xG, b, t_w, a1, t1, a2)) return c;
  }
  // Second segment pinned.
  for (double a2 : {b.a_max, b.a_min}) {
    const double denom = V - a2 * t_w;
    if (std::abs(denom) < 1e-300) continue;
    const double t2 = (2.0 * P - V * t_w) / denom;
    const double t1 = t_w - t2;
    const double a1 = std::abs(t1) > 1e-300 ? (V - a2 * t2) / t1 : a2;
    if (auto c = detail::try_fixed_time(xI, xG, b, t_w, a1, t1, a2)) return c;
  }

  // The wait profile declared t_w feasible; reaching this line means the
  // solver tiers above missed a solution.
  throw std::logic_error("fixed_time_steer_1d: solver exhausted");
}

/// Smallest time t with t >= t_star_i for every axis and t outside every
/// axis's gap interval. Line sweep over sorted event times; O(n log n).
inline double min_sync_time(const std::vector<WaitProfile>& profiles) {
  if (profiles.empty())
    throw std::invalid_argument("min_sync_time: empty profile list");

  // Event kinds: +1 when an axis becomes feasible (t_star, t_mirror),
  // -1 when a gap opens (just after t_limit). Increments are processed
  // before decrements at equal times because intervals are closed.
  struct Event {
    double t;
    int delta;
  };
  std::vector<Event> events;
  events.reserve(profiles.size() * 3);
  for (const auto& p : profiles) {
    events.push_back({p.t_star, +1});
    if (p.gap) {
      events.push_back({p.gap->t_limit, -1});
      events.push_back({p.gap->t_mirror, +1});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.delta > b.delta;
  });

  const int n = static_cast<int>(profiles.size());
  int feasible = 0;
  for (const auto& e : events) {
    feasible += e.delta;
    if (feasible == n) return e.t;
  }
  throw std::logic_error("min_sync_time: sweep failed");  // unreachable
}

/// Synchronized steering plan for n double integrators.
struct SteeringPlanN {
  std::vector<PiecewiseControl1> per_axis;
  double arrival_time = 0.0;
};

/// Steers every axis from xI to xG so that all axes arrive simultaneously
/// at the smallest common feasible time.
inline SteeringPlanN steer_nd(const PhaseStateN& xI, const PhaseStateN& xG,
                              const std::vector<AccelBounds>& bounds) {
  const std::size_t n = xI.dims();
  if (xG.dims() != n || bounds.size() != n || xI.qd.size() != n ||
      xG.qd.size() != n)
    throw std::invalid_argument("steer_nd: dimension mismatch");

  SteeringPlanN plan;
  if (xI == xG) {
    plan.per_axis.resize(n);
    return plan;
  }

  std::vector<WaitProfile> profiles(n);
  for (std::size_t i = 0; i < n; ++i)
    profiles[i] = wait_profile_1d(xI.axis(i), xG.axis(i), bounds[i]);

  const double t = min_sync_time(profiles);
  plan.arrival_time = t;
  plan.per_axis.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (t <= 0.0) continue;  // all axes already at goal
    auto c = fixed_time_steer_1d(xI.axis(i), xG.axis(i), bounds[i], t);
    if (!c) throw std::logic_error("steer_nd: axis infeasible at sync time");
    plan.per_axis[i] = std::move(*c);
  }
  return plan;
}

/// Quasimetric rho1: the largest per-axis minimum time. Fast, ignores the
/// synchronization (waiting) constraint, so it can underestimate.
inline double rho1(const PhaseStateN& x, const PhaseStateN& x2,
                   const std::vector<AccelBounds>& bounds) {
  const std::size_t n = x.dims();
  if (x2.dims() != n || bounds.size() != n)
    throw std::invalid_argument("rho1: dimension mismatch");
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    t = std::max(t, min_time_1d(x.axis(i), x2.axis(i), bounds[i]));
  return t;
}

/// Quasimetric rho2: the synchronized arrival time including waiting.
/// Always >= rho1.
inline double rho2(const PhaseStateN& x, const PhaseStateN& x2,
                   const std::vector<AccelBounds>& bounds) {
  const std::size_t n = x.dims();
  if (x2.dims() != n || bounds.size() != n)
    throw std::invalid_argument("rho2: dimension mismatch");
  if (x == x2) return 0.0;
  std::vector<WaitProfile> profiles(n);
  for (std::size_t i = 0; i < n; ++i)
    profiles[i] = wait_profile_1d(x.axis(i), x2.axis(i), bounds[i]);
  return min_sync_time(profiles);
}

}  // namespace kino
