#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kino/json_io.hpp"
#include "kino/planners.hpp"
#include "kino/rng.hpp"
#include "oracles.hpp"

using kino::PhaseStateN;
using kino::PlanQuery;
using kino::PlanResult;
using kino::Scene;

namespace {

Scene empty_scene(double half = 10.0, double vmax = 10.0) {
  Scene s;
  s.q_bounds = {{-half, half}, {-half, half}};
  s.v_bounds = {{-vmax, vmax}, {-vmax, vmax}};
  s.accel = {{-1, 1}, {-1, 1}};
  s.robot = kino::PlanarPoint{};
  s.resolution = 0.25;
  return s;
}

Scene walled_scene() {
  Scene s = empty_scene();
  // Vertical wall splitting the box, with a gap at the top.
  s.obstacles.push_back({{-0.5, -10}, {0.5, -10}, {0.5, 6}, {-0.5, 6}});
  return s;
}

Scene maze_scene() {
  return kino::load_scene(std::string(KINO_SCENE_DIR) + "/maze_a.json");
}

PhaseStateN rest(double x, double y) { return {{x, y}, {0.0, 0.0}}; }

void check_solution(const Scene& scene, const PlanResult& r,
                    const PhaseStateN& xi, const PhaseStateN& xg,
                    double resolution) {
  REQUIRE(r.solved());
  REQUIRE(r.trajectory.has_value());
  const auto& t = *r.trajectory;
  REQUIRE(kino::max_abs_diff(t.x0, xi) < 1e-9);
  REQUIRE(kino::max_abs_diff(kino::evaluate(t, t.duration), xg) < 1e-9);
  // Independent re-check at 10x finer resolution.
  const auto rep = kino::trajectory_free(scene, t, resolution / 10.0);
  REQUIRE(rep.free);
}

}  // namespace

TEST_CASE("bb_nearest: direction-aware linear scan") {
  const std::vector<kino::AccelBounds> b1{{-1, 1}};
  const std::vector<PhaseStateN> pts{{{0.0}, {0.0}}, {{0.9}, {0.0}}};
  const PhaseStateN target{{1.0}, {0.0}};
  // Rest-to-rest from 0.9 takes 2 sqrt(0.1), from 0 takes 2; nearer wins.
  const auto n = kino::bb_nearest(pts, target, kino::Metric::kRho1, b1);
  CHECK(n.q[0] == 0.9);

  const std::vector<PhaseStateN> with_target{{{0.0}, {0.0}}, target};
  CHECK(kino::bb_nearest(with_target, target, kino::Metric::kRho1, b1)
            .q[0] == 1.0);

  CHECK_THROWS_AS(kino::bb_nearest({}, target, kino::Metric::kRho1, b1),
                  std::invalid_argument);

  SECTION("singleton") {
    CHECK(kino::bb_nearest({pts[0]}, target, kino::Metric::kRho2, b1).q[0] ==
          0.0);
  }
}

TEST_CASE("bb_steer_checked: reach, block, and degenerate cases") {
  SECTION("empty scene reaches the target exactly") {
    const Scene s = empty_scene();
    const auto out = kino::bb_steer_checked(s, rest(-5, -5), rest(5, 5),
                                            s.accel, s.resolution);
    CHECK(out.reached_target);
    CHECK(kino::max_abs_diff(out.reached, rest(5, 5)) == 0.0);
    CHECK(out.checks > 0);
  }
  SECTION("wall stops the steer at a collision-free prefix") {
    const Scene s = walled_scene();
    const auto out = kino::bb_steer_checked(s, rest(-5, -5), rest(5, -5),
                                            s.accel, s.resolution);
    CHECK_FALSE(out.reached_target);
    CHECK(out.trajectory.duration >= 0.0);
    CHECK(out.reached.q[0] < -0.5);  // still left of the wall
    if (out.trajectory.duration > 0.0) {
      const auto rep =
          kino::trajectory_free(s, out.trajectory, s.resolution / 10.0);
      CHECK(rep.free);
    }
  }
  SECTION("from equals to") {
    const Scene s = empty_scene();
    const auto out =
        kino::bb_steer_checked(s, rest(1, 1), rest(1, 1), s.accel, 0.25);
    CHECK(out.reached_target);
    CHECK(out.trajectory.duration == 0.0);
  }
}

TEST_CASE("tree chains propagate exactly") {
  const Scene s = empty_scene();
  kino::detail::Tree tree;
  tree.init(rest(-5, -5), false);
  kino::Rng rng(2);
  int tip = 0;
  for (int k = 0; k < 5; ++k) {
    const PhaseStateN target{{rng.uniform(-9, 9), rng.uniform(-9, 9)},
                             {rng.uniform(-2, 2), rng.uniform(-2, 2)}};
    const auto steer = kino::bb_steer_checked(s, tree.states[tip], target,
                                              s.accel, s.resolution);
    REQUIRE(steer.reached_target);
    tip = tree.add_chain(tip, steer, 12);
  }
  // Every node's state equals closed-form propagation from the root.
  for (int idx = 0; idx < tree.size(); ++idx) {
    const auto chain = tree.chain_trajectory(idx);
    REQUIRE(kino::max_abs_diff(kino::end_state(chain),
                               tree.nodes[idx].state) < 1e-9);
  }
  REQUIRE(tree.size() > 6);  // intermediate nodes were inserted
}

TEST_CASE("bb_rrt: empty scene connects on the first iteration") {
  // Bounds wide enough that the state-space box never blocks a steer, so
  // every extension reaches its target and the trees join immediately.
  const Scene s = empty_scene(1e4, 1e4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlanQuery q;
    q.x_init = rest(-5, -5);
    q.x_goal = rest(5, 5);
    q.seed = seed;
    q.resolution = 1.0;
    const PlanResult r = kino::bb_rrt_bidirectional(s, q);
    check_solution(s, r, q.x_init, q.x_goal, 1.0);
    CHECK(r.stats.iterations == 1);
  }
}

TEST_CASE("bb_rrt: identical start and goal") {
  const Scene s = empty_scene();
  PlanQuery q;
  q.x_init = rest(0, 0);
  q.x_goal = rest(0, 0);
  const PlanResult r = kino::bb_rrt_bidirectional(s, q);
  REQUIRE(r.solved());
  CHECK(r.trajectory->duration == 0.0);
}

TEST_CASE("bb_rrt: start in collision is rejected") {
  Scene s = walled_scene();
  PlanQuery q;
  q.x_init = rest(0, 0);  // inside the wall
  q.x_goal = rest(5, 5);
  CHECK_THROWS_AS(kino::bb_rrt_bidirectional(s, q), std::invalid_argument);
}

TEST_CASE("bb_rrt: walled scene with both metrics") {
  const Scene s = walled_scene();
  for (const auto metric : {kino::Metric::kRho1, kino::Metric::kRho2}) {
    PlanQuery q;
    q.x_init = rest(-5, -5);
    q.x_goal = rest(5, -5);
    q.seed = 7;
    q.metric = metric;
    q.max_iterations = 5000;
    const PlanResult r = kino::bb_rrt_bidirectional(s, q);
    check_solution(s, r, q.x_init, q.x_goal, s.resolution);
  }
}

TEST_CASE("bb_rrt: maze solutions are valid and deterministic") {
  const Scene s = maze_scene();
  PlanQuery q;
  q.x_init = rest(80, 80);
  q.x_goal = rest(720, 720);
  q.max_iterations = 20000;

  int solved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    q.seed = seed;
    const PlanResult r = kino::bb_rrt_bidirectional(s, q);
    if (!r.solved()) continue;
    ++solved;
    check_solution(s, r, q.x_init, q.x_goal, s.resolution);
  }
  CHECK(solved == 10);

  q.seed = 3;
  const PlanResult a = kino::bb_rrt_bidirectional(s, q);
  const PlanResult b = kino::bb_rrt_bidirectional(s, q);
  REQUIRE(a.solved());
  REQUIRE(b.solved());
  CHECK(kino::trajectory_to_json(*a.trajectory).dump() ==
        kino::trajectory_to_json(*b.trajectory).dump());
  CHECK(a.stats.nodes == b.stats.nodes);
  CHECK(a.stats.collision_checks == b.stats.collision_checks);
}

TEST_CASE("baseline rrt: empty scene sanity and junction gap") {
  const Scene s = empty_scene(40.0);
  PlanQuery q;
  q.x_init = rest(-20, -20);
  q.x_goal = rest(25, 25);
  q.seed = 5;
  q.max_iterations = 20000;
  kino::BaselineParams params;
  params.delta_t = 1.0;
  params.connect_dq = 2.0;
  params.connect_dqd = 1.0;
  const PlanResult r = kino::baseline_rrt_bidirectional(s, q, params);
  REQUIRE(r.solved());
  CHECK(r.stats.connect_gap_q <= params.connect_dq);
  CHECK(r.stats.connect_gap_qd <= params.connect_dqd);
  CHECK(r.trajectory->duration > 0.0);
  CHECK(kino::max_abs_diff(r.trajectory->x0, q.x_init) == 0.0);

  SECTION("start in collision rejected") {
    Scene sw = walled_scene();
    PlanQuery bad;
    bad.x_init = rest(0, 0);
    bad.x_goal = rest(5, 5);
    CHECK_THROWS_AS(kino::baseline_rrt_bidirectional(sw, bad, params),
                    std::invalid_argument);
  }
}

TEST_CASE("rrt_connect: direct, planned, and degenerate paths") {
  SECTION("empty scene gives the two-vertex path") {
    const Scene s = empty_scene();
    const auto r =
        kino::rrt_connect_geometric(s, {-5, -5}, {5, 5}, 1.0, 0, 1000);
    REQUIRE(r.solved());
    REQUIRE(r.path->size() == 2);
    CHECK((*r.path)[0] == std::vector<double>{-5, -5});
    CHECK((*r.path)[1] == std::vector<double>{5, 5});
  }
  SECTION("identical start and goal") {
    const Scene s = empty_scene();
    const auto r =
        kino::rrt_connect_geometric(s, {1, 1}, {1, 1}, 1.0, 0, 1000);
    REQUIRE(r.solved());
    CHECK(r.path->size() == 1);
  }
  SECTION("maze path segments all pass a finer collision check") {
    const Scene s = maze_scene();
    const auto r = kino::rrt_connect_geometric(s, {80, 80}, {720, 720}, 40.0,
                                               11, 100000);
    REQUIRE(r.solved());
    REQUIRE(r.path->size() >= 2);
    CHECK(kino::detail::euclid2(r.path->front(), {80, 80}) == 0.0);
    CHECK(kino::detail::euclid2(r.path->back(), {720, 720}) == 0.0);
    std::int64_t checks = 0;
    for (std::size_t i = 0; i + 1 < r.path->size(); ++i)
      REQUIRE(kino::detail::segment_free(s, (*r.path)[i], (*r.path)[i + 1],
                                         s.resolution / 10.0, checks));
  }
}
