#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kino/rng.hpp"
#include "kino/steering.hpp"
#include "oracles.hpp"

using kino::AccelBounds;
using kino::PhaseState1;
using kino::WaitProfile;

namespace {

PhaseState1 apply(const kino::PiecewiseControl1& c, PhaseState1 x) {
  return c.end_state(x);
}

}  // namespace

TEST_CASE("parabola intercept") {
  CHECK(kino::parabola_intercept({0.0, 0.0}, 1.0) == 0.0);
  CHECK(kino::parabola_intercept({1.0, 2.0}, 1.0) == Catch::Approx(-1.0));
  // Integrating qddot = -1 from (0.25, 1) until qd = 0 parks at q = 0.75.
  CHECK(kino::parabola_intercept({0.25, 1.0}, -1.0) == Catch::Approx(0.75));
  CHECK_THROWS_AS(kino::parabola_intercept({0.0, 0.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("min time steering: symmetric rest-to-rest") {
  const auto r = kino::min_time_steer_1d({0, 0}, {1, 0}, {-1, 1});
  CHECK(r.t_star == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(r.control.segments.size() == 2);
  CHECK(r.control.segments[0].accel == 1.0);
  CHECK(r.control.segments[0].duration == Catch::Approx(1.0));
  CHECK(r.control.segments[1].accel == -1.0);
  CHECK(r.control.segments[1].duration == Catch::Approx(1.0));
  CHECK(r.switch_state.q == Catch::Approx(0.5));
  CHECK(r.switch_state.qd == Catch::Approx(1.0));
}

TEST_CASE("min time steering: single bang velocity reversal") {
  const auto r = kino::min_time_steer_1d({0, 1}, {0, -1}, {-1, 1});
  CHECK(r.t_star == Catch::Approx(2.0).margin(1e-12));
  const auto norm = r.control.normalized();
  REQUIRE(norm.segments.size() == 1);
  CHECK(norm.segments[0].accel == -1.0);
  CHECK(norm.segments[0].duration == Catch::Approx(2.0));
}

TEST_CASE("min time steering: same-velocity shift") {
  const auto r = kino::min_time_steer_1d({0, 1}, {0.25, 1}, {-1, 1});
  CHECK(r.t_star == Catch::Approx(2.0 * (std::sqrt(1.25) - 1.0)).epsilon(1e-9));
  CHECK(r.t_star == Catch::Approx(0.23607).margin(1e-5));
  CHECK(r.switch_state.q == Catch::Approx(0.125).margin(1e-9));
  CHECK(r.switch_state.qd == Catch::Approx(std::sqrt(1.25)).margin(1e-9));
}

TEST_CASE("min time steering: asymmetric bounds") {
  const auto r = kino::min_time_steer_1d({0, 0}, {1, 0}, {-2, 1});
  CHECK(r.t_star == Catch::Approx(std::sqrt(3.0)).epsilon(1e-9));
  // Accelerate at +1 twice as long as the -2 braking segment.
  CHECK(r.control.segments[0].duration ==
        Catch::Approx(2.0 * r.control.segments[1].duration).epsilon(1e-9));
}

TEST_CASE("Prop 1 property: exact arrival and extremal bang structure") {
  kino::Rng rng(42);
  for (int it = 0; it < 100000; ++it) {
    const PhaseState1 xi = oracle::random_state(rng);
    const PhaseState1 xg = oracle::random_state(rng);
    const AccelBounds b = oracle::random_bounds(rng);
    const auto r = kino::min_time_steer_1d(xi, xg, b);
    REQUIRE(r.control.segments.size() <= 2);
    for (const auto& s : r.control.segments) {
      REQUIRE(s.duration >= 0.0);
      const bool extremal = s.accel == b.a_min || s.accel == b.a_max;
      REQUIRE(extremal);
    }
    const PhaseState1 end = apply(r.control, xi);
    REQUIRE(std::abs(end.q - xg.q) < 1e-9);
    REQUIRE(std::abs(end.qd - xg.qd) < 1e-9);
  }
}

TEST_CASE("min time matches brute-force oracle") {
  kino::Rng rng(7);
  for (int it = 0; it < 2000; ++it) {
    const PhaseState1 xi = oracle::random_state(rng);
    const PhaseState1 xg = oracle::random_state(rng);
    const AccelBounds b = oracle::random_bounds(rng);
    const double t_impl = kino::min_time_steer_1d(xi, xg, b).t_star;
    const double t_oracle = oracle::min_time_brute(xi, xg, b);
    REQUIRE(std::isfinite(t_oracle));
    REQUIRE(t_impl ==
            Catch::Approx(t_oracle).epsilon(1e-3).margin(1e-6));
  }
}

TEST_CASE("more control authority never slows the steer") {
  kino::Rng rng(11);
  for (int it = 0; it < 10000; ++it) {
    const PhaseState1 xi = oracle::random_state(rng);
    const PhaseState1 xg = oracle::random_state(rng);
    const AccelBounds b = oracle::random_bounds(rng);
    const AccelBounds wide{2.0 * b.a_min, 2.0 * b.a_max};
    const double t1 = kino::min_time_steer_1d(xi, xg, b).t_star;
    const double t2 = kino::min_time_steer_1d(xi, xg, wide).t_star;
    REQUIRE(t2 <= t1 + 1e-9);
  }
}

TEST_CASE("wait profile: rest-to-rest has no gap") {
  const WaitProfile p = kino::wait_profile_1d({0, 0}, {1, 0}, {-1, 1});
  CHECK(p.t_star == Catch::Approx(2.0));
  CHECK_FALSE(p.gap.has_value());
}

TEST_CASE("wait profile: same-velocity shift has the known gap") {
  const WaitProfile p = kino::wait_profile_1d({0, 1}, {0.25, 1}, {-1, 1});
  CHECK(p.t_star == Catch::Approx(0.23607).margin(1e-5));
  REQUIRE(p.gap.has_value());
  // qd_limit = sqrt(0.75); t_limit = 2 (1 - sqrt(0.75));
  // t_mirror = t_limit + 2 sqrt(0.75) (1/a_max + 1/|a_min|).
  const double qd_limit = std::sqrt(0.75);
  CHECK(p.gap->t_limit == Catch::Approx(2.0 * (1.0 - qd_limit)).epsilon(1e-9));
  CHECK(p.gap->t_limit == Catch::Approx(0.26795).margin(1e-5));
  CHECK(p.gap->t_mirror ==
        Catch::Approx(2.0 * (1.0 - qd_limit) + 2.0 * qd_limit * 2.0)
            .epsilon(1e-9));
  CHECK(p.gap->t_mirror == Catch::Approx(3.73205).margin(1e-5));
}

TEST_CASE("wait profile: degenerate zero-width gap is absent") {
  const WaitProfile p = kino::wait_profile_1d({0, 1}, {1, 1}, {-1, 1});
  CHECK_FALSE(p.gap.has_value());
  // The limit and mirror trajectories coincide at duration 2.
  const auto c = kino::fixed_time_steer_1d({0, 1}, {1, 1}, {-1, 1}, 2.0);
  REQUIRE(c.has_value());
}

TEST_CASE("fixed time: minimum-time boundary reproduces the optimal bang") {
  const auto c = kino::fixed_time_steer_1d({0, 0}, {1, 0}, {-1, 1}, 2.0);
  REQUIRE(c.has_value());
  const PhaseState1 end = apply(*c, {0, 0});
  CHECK(std::abs(end.q - 1.0) < 1e-9);
  CHECK(std::abs(end.qd) < 1e-9);
  CHECK(c->duration() == Catch::Approx(2.0));
}

TEST_CASE("fixed time: inside the gap is infeasible, beyond it succeeds") {
  CHECK_FALSE(
      kino::fixed_time_steer_1d({0, 1}, {0.25, 1}, {-1, 1}, 1.0).has_value());
  const auto c = kino::fixed_time_steer_1d({0, 1}, {0.25, 1}, {-1, 1}, 4.0);
  REQUIRE(c.has_value());
  const PhaseState1 end = apply(*c, {0, 1});
  CHECK(std::abs(end.q - 0.25) < 1e-9);
  CHECK(std::abs(end.qd - 1.0) < 1e-9);
  CHECK(c->duration() == Catch::Approx(4.0));
  CHECK_THROWS_AS(kino::fixed_time_steer_1d({0, 1}, {0.25, 1}, {-1, 1}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("Prop 2 property: feasibility matches the wait profile") {
  kino::Rng rng(1234);
  int with_gap = 0;
  for (int it = 0; it < 20000 && with_gap < 250; ++it) {
    const PhaseState1 xi = oracle::random_state(rng);
    const PhaseState1 xg = oracle::random_state(rng);
    const AccelBounds b = oracle::random_bounds(rng);
    const WaitProfile p = kino::wait_profile_1d(xi, xg, b);
    if (!p.gap) continue;
    ++with_gap;
    const double width = p.gap->t_mirror - p.gap->t_limit;
    // Strictly inside the gap: infeasible.
    for (int k = 1; k <= 8; ++k) {
      const double tw = p.gap->t_limit + width * k / 9.0;
      if (tw - p.gap->t_limit < 1e-6 || p.gap->t_mirror - tw < 1e-6) continue;
      REQUIRE_FALSE(kino::fixed_time_steer_1d(xi, xg, b, tw).has_value());
    }
    // Boundary and outside: feasible with exact landing.
    for (double tw : {p.gap->t_limit, p.gap->t_mirror, p.gap->t_mirror + 1.0,
                      0.5 * (p.t_star + p.gap->t_limit)}) {
      if (!(tw > 0.0)) continue;
      const auto c = kino::fixed_time_steer_1d(xi, xg, b, tw);
      REQUIRE(c.has_value());
      const PhaseState1 end = apply(*c, xi);
      REQUIRE(std::abs(end.q - xg.q) < 1e-7);
      REQUIRE(std::abs(end.qd - xg.qd) < 1e-7);
      REQUIRE(c->duration() == Catch::Approx(tw).margin(1e-9));
      for (const auto& s : c->segments) REQUIRE(b.contains(s.accel, 1e-9));
    }
  }
  REQUIRE(with_gap >= 250);
}

TEST_CASE("fixed time: random feasible times land exactly") {
  kino::Rng rng(555);
  for (int it = 0; it < 20000; ++it) {
    const PhaseState1 xi = oracle::random_state(rng);
    const PhaseState1 xg = oracle::random_state(rng);
    const AccelBounds b = oracle::random_bounds(rng);
    const WaitProfile p = kino::wait_profile_1d(xi, xg, b);
    double tw = p.t_star * (1.0 + rng.uniform() * 3.0) + rng.uniform();
    if (!p.feasible(tw)) tw = p.gap->t_mirror + rng.uniform();
    if (!(tw > 0.0)) continue;
    const auto c = kino::fixed_time_steer_1d(xi, xg, b, tw);
    REQUIRE(c.has_value());
    const PhaseState1 end = apply(*c, xi);
    REQUIRE(std::abs(end.q - xg.q) < 1e-7);
    REQUIRE(std::abs(end.qd - xg.qd) < 1e-7);
  }
}

TEST_CASE("min sync time: examples") {
  using kino::GapInterval;
  CHECK(kino::min_sync_time({WaitProfile{2.0, std::nullopt}}) == 2.0);
  CHECK(kino::min_sync_time({WaitProfile{1.0, GapInterval{2.0, 5.0}},
                             WaitProfile{3.0, std::nullopt}}) == 5.0);
  // Both axes are feasible at the larger t_star already: axis 1 is outside
  // its own gap there and axis 2 starts there.
  const std::vector<WaitProfile> profiles{
      WaitProfile{1.0, GapInterval{2.0, 5.0}},
      WaitProfile{1.5, GapInterval{1.8, 1.9}}};
  const double t = kino::min_sync_time(profiles);
  CHECK(t == oracle::min_sync_brute(profiles));
  CHECK(t == 1.5);
  CHECK_THROWS_AS(kino::min_sync_time({}), std::invalid_argument);
}

TEST_CASE("Prop 3 property: sweep equals the naive event scan") {
  kino::Rng rng(99);
  for (int it = 0; it < 10000; ++it) {
    const int n = 1 + static_cast<int>(rng.uniform_index(64));
    std::vector<WaitProfile> profiles(n);
    for (auto& p : profiles) {
      p.t_star = rng.uniform(0.0, 10.0);
      if (rng.coin()) {
        const double lim = p.t_star + rng.uniform(0.0, 5.0);
        p.gap = kino::GapInterval{lim, lim + rng.uniform(0.0, 5.0) + 1e-6};
      }
    }
    const double impl = kino::min_sync_time(profiles);
    const double brute = oracle::min_sync_brute(profiles);
    REQUIRE(impl == brute);
  }
}

TEST_CASE("steer_nd synchronizes axes") {
  using kino::PhaseStateN;
  const std::vector<AccelBounds> bounds{{-1, 1}, {-1, 1}};

  SECTION("identical axes") {
    const auto plan = kino::steer_nd(PhaseStateN{{0, 0}, {0, 0}},
                                     PhaseStateN{{1, 1}, {0, 0}}, bounds);
    CHECK(plan.arrival_time == Catch::Approx(2.0));
  }
  SECTION("slower axis stretches the faster one") {
    const PhaseStateN xi{{0, 0}, {0, 0}};
    const PhaseStateN xg{{1, 4}, {0, 0}};
    const auto plan = kino::steer_nd(xi, xg, bounds);
    CHECK(plan.arrival_time == Catch::Approx(4.0));
    for (std::size_t i = 0; i < 2; ++i) {
      const PhaseState1 end = plan.per_axis[i].end_state(xi.axis(i));
      CHECK(std::abs(end.q - xg.q[i]) < 1e-9);
      CHECK(std::abs(end.qd - xg.qd[i]) < 1e-9);
      CHECK(plan.per_axis[i].duration() ==
            Catch::Approx(4.0).margin(1e-9));
    }
  }
  SECTION("identity query") {
    const PhaseStateN x{{0.3, -2.0}, {1.0, 0.5}};
    const auto plan = kino::steer_nd(x, x, bounds);
    CHECK(plan.arrival_time == 0.0);
    for (const auto& axis : plan.per_axis) CHECK(axis.segments.empty());
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(kino::steer_nd(PhaseStateN{{0}, {0}},
                                   PhaseStateN{{1, 1}, {0, 0}}, bounds),
                    std::invalid_argument);
  }
}

TEST_CASE("steer_nd random end-state exactness") {
  kino::Rng rng(31);
  for (int it = 0; it < 2000; ++it) {
    const int n = 1 + static_cast<int>(rng.uniform_index(6));
    kino::PhaseStateN xi = kino::PhaseStateN::zeros(n);
    kino::PhaseStateN xg = kino::PhaseStateN::zeros(n);
    std::vector<AccelBounds> bounds(n);
    for (int i = 0; i < n; ++i) {
      const PhaseState1 a = oracle::random_state(rng);
      const PhaseState1 b = oracle::random_state(rng);
      xi.set_axis(i, a);
      xg.set_axis(i, b);
      bounds[i] = oracle::random_bounds(rng);
    }
    const auto plan = kino::steer_nd(xi, xg, bounds);
    for (int i = 0; i < n; ++i) {
      const PhaseState1 end = plan.per_axis[i].end_state(xi.axis(i));
      REQUIRE(std::abs(end.q - xg.q[i]) < 1e-7);
      REQUIRE(std::abs(end.qd - xg.qd[i]) < 1e-7);
      REQUIRE(std::abs(plan.per_axis[i].duration() - plan.arrival_time) <
              1e-9);
    }
  }
}

TEST_CASE("rho metrics") {
  using kino::PhaseStateN;
  const std::vector<AccelBounds> bounds{{-1, 1}, {-1, 1}};
  const PhaseStateN a{{0, 0}, {0, 0}};
  const PhaseStateN b{{1, 4}, {0, 0}};
  CHECK(kino::rho1(a, a, bounds) == 0.0);
  CHECK(kino::rho2(a, a, bounds) == 0.0);
  CHECK(kino::rho1(a, b, bounds) == Catch::Approx(4.0));

  const std::vector<AccelBounds> b1{{-1, 1}};
  CHECK(kino::rho1(PhaseStateN{{0}, {1}}, PhaseStateN{{0.25}, {1}}, b1) ==
        Catch::Approx(0.23607).margin(1e-5));

  kino::Rng rng(8);
  for (int it = 0; it < 3000; ++it) {
    kino::PhaseStateN x = kino::PhaseStateN::zeros(2);
    kino::PhaseStateN y = kino::PhaseStateN::zeros(2);
    std::vector<AccelBounds> bb(2);
    for (int i = 0; i < 2; ++i) {
      x.set_axis(i, oracle::random_state(rng));
      y.set_axis(i, oracle::random_state(rng));
      bb[i] = oracle::random_bounds(rng);
    }
    const double r1 = kino::rho1(x, y, bb);
    const double r2 = kino::rho2(x, y, bb);
    REQUIRE(r1 >= 0.0);
    REQUIRE(r2 >= r1 - 1e-12);
  }
}
