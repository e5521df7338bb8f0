#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kino {

/// Acceleration interval [a_min, a_max] for one axis. The interval must
/// straddle zero so that any velocity can be brought back to rest.
struct AccelBounds {
  double a_min = -1.0;
  double a_max = 1.0;

  bool valid() const {
    return std::isfinite(a_min) && std::isfinite(a_max) && a_min < 0.0 &&
           0.0 < a_max;
  }
  /// Largest magnitude usable symmetrically (both +a and -a admissible).
  double symmetric_cap() const { return std::min(a_max, -a_min); }
  bool contains(double a, double tol = 0.0) const {
    return a >= a_min - tol && a <= a_max + tol;
  }
};

/// One axis of the phase plane: position and velocity.
struct PhaseState1 {
  double q = 0.0;
  double qd = 0.0;
};

inline bool finite(const PhaseState1& x) {
  return std::isfinite(x.q) && std::isfinite(x.qd);
}

/// Closed-form propagation under constant acceleration.
inline PhaseState1 advance(const PhaseState1& x, double accel, double dt) {
  return {x.q + x.qd * dt + 0.5 * accel * dt * dt, x.qd + accel * dt};
}

/// Constant acceleration applied for a nonnegative duration.
struct ControlSegment {
  double accel = 0.0;
  double duration = 0.0;
};

/// Piecewise-constant control for one axis.
struct PiecewiseControl1 {
  std::vector<ControlSegment> segments;

  double duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }

  PhaseState1 end_state(PhaseState1 x) const {
    for (const auto& s : segments) x = advance(x, s.accel, s.duration);
    return x;
  }

  /// State at time t (clamped into [0, duration] within `slack`).
  PhaseState1 at(PhaseState1 x, double t, double slack = 1e-9) const {
    if (t < -slack) throw std::out_of_range("PiecewiseControl1::at: t < 0");
    t = std::max(t, 0.0);
    for (const auto& s : segments) {
      if (t <= s.duration) return advance(x, s.accel, t);
      x = advance(x, s.accel, s.duration);
      t -= s.duration;
    }
    if (t > slack)
      throw std::out_of_range("PiecewiseControl1::at: t > duration");
    return x;
  }

  /// Copy without zero-duration segments (used for serialization).
  PiecewiseControl1 normalized(double tol = 0.0) const {
    PiecewiseControl1 out;
    out.segments.reserve(segments.size());
    for (const auto& s : segments)
      if (s.duration > tol) out.segments.push_back(s);
    return out;
  }

  void append(const PiecewiseControl1& other) {
    segments.insert(segments.end(), other.segments.begin(),
                    other.segments.end());
  }
};

/// Planning state for n independent double integrators.
struct PhaseStateN {
  std::vector<double> q;
  std::vector<double> qd;

  PhaseStateN() = default;
  PhaseStateN(std::vector<double> q_, std::vector<double> qd_)
      : q(std::move(q_)), qd(std::move(qd_)) {}

  std::size_t dims() const { return q.size(); }
  PhaseState1 axis(std::size_t i) const { return {q[i], qd[i]}; }
  void set_axis(std::size_t i, const PhaseState1& x) {
    q[i] = x.q;
    qd[i] = x.qd;
  }

  static PhaseStateN zeros(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  }
  static PhaseStateN at_rest(std::vector<double> config) {
    std::size_t n = config.size();
    return {std::move(config), std::vector<double>(n, 0.0)};
  }

  /// Time reversal maps (q, qd) to (q, -qd).
  PhaseStateN reversed() const {
    PhaseStateN r = *this;
    for (double& v : r.qd) v = -v;
    return r;
  }
};

inline bool operator==(const PhaseStateN& a, const PhaseStateN& b) {
  return a.q == b.q && a.qd == b.qd;
}

inline double max_abs_diff(const PhaseStateN& a, const PhaseStateN& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.q.size(); ++i) {
    d = std::max(d, std::abs(a.q[i] - b.q[i]));
    d = std::max(d, std::abs(a.qd[i] - b.qd[i]));
  }
  return d;
}

}  // namespace kino
