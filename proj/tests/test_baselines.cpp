#include <doctest.h>

#include <cmath>

#include "lspp/baselines.hpp"
#include "lspp/eval.hpp"
#include "lspp/geometry.hpp"
#include "lspp/kinematics.hpp"

using namespace lspp;

namespace {

/// Free-space scenario with a nearby reachable target: perturb a valid start
/// configuration and take the perturbed FK as the goal.
Scenario easy_scenario(const RobotModel& robot, Rng& rng, double perturbation = 0.25) {
  const DatagenConfig cfg;
  Scenario sc;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng stream(rng.next_u64());
    const StateSample start = sample_state(stream, robot, cfg);
    JointConfig q_goal = start.q + perturbation * Vector7d(stream.normal_vector(7));
    q_goal = q_goal.cwiseMax(robot.limits.lower).cwiseMin(robot.limits.upper);
    const CollisionReport rep = arm_in_collision(q_goal, {}, robot.dh, robot.shape);
    if (rep.self_collision || rep.table) continue;
    sc.seed = attempt;
    sc.start_q = start.q;
    sc.target_q_hidden = q_goal;
    sc.target_e = forward_kinematics(q_goal, robot.dh);
    return sc;
  }
  throw std::runtime_error("easy_scenario: no feasible pair found");
}

}  // namespace

TEST_CASE("potential field: reaches a nearby free-space target") {
  const RobotModel robot = panda_model();
  Rng rng(201);
  PotentialFieldConfig cfg;
  int reached = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Scenario sc = easy_scenario(robot, rng, 0.15);
    const PlanResult r = plan_potential_field(sc, robot, cfg);
    if (r.status == PlanStatus::kReached) {
      ++reached;
      CHECK((forward_kinematics(r.steps.back().q, robot.dh) - sc.target_e).norm() <
            cfg.reach_threshold);
    }
  }
  CHECK(reached == 10);
}

TEST_CASE("potential field: distance decreases monotonically in free space") {
  const RobotModel robot = panda_model();
  Rng rng(202);
  PotentialFieldConfig cfg;
  cfg.step_size = 0.01;
  int monotone = 0, total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Scenario sc = easy_scenario(robot, rng, 0.2);
    const PlanResult r = plan_potential_field(sc, robot, cfg);
    if (r.status != PlanStatus::kReached) continue;
    ++total;
    bool ok = true;
    for (std::size_t t = 1; t < r.steps.size(); ++t) {
      const double prev = (r.steps[t - 1].e - sc.target_e).norm();
      const double cur = (r.steps[t].e - sc.target_e).norm();
      if (cur >= prev + 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) ++monotone;
  }
  CHECK(total >= 45);
  CHECK(monotone == total);
}

TEST_CASE("potential field: blocked target stalls without crashing") {
  const RobotModel robot = panda_model();
  Rng rng(203);
  Scenario sc = easy_scenario(robot, rng, 0.6);
  // wall of a cylinder right between start and target
  const Vector3d e0 = forward_kinematics(sc.start_q, robot.dh);
  const Vector3d mid = 0.5 * (e0 + sc.target_e);
  sc.obstacles.push_back({mid.x(), mid.y(), 1.5, 0.25});
  PotentialFieldConfig cfg;
  cfg.influence_radius = 0.08;  // weak influence invites local minima
  cfg.max_iterations = 400;
  const PlanResult r = plan_potential_field(sc, robot, cfg);
  CHECK(r.steps.size() >= 1);
  CHECK((r.status == PlanStatus::kReached || r.status == PlanStatus::kMaxSteps));
}

TEST_CASE("potential field: deterministic (no rng anywhere)") {
  const RobotModel robot = panda_model();
  Rng rng(204);
  const Scenario sc = easy_scenario(robot, rng, 0.3);
  const PlanResult a = plan_potential_field(sc, robot, PotentialFieldConfig{});
  const PlanResult b = plan_potential_field(sc, robot, PotentialFieldConfig{});
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t)
    CHECK((a.steps[t].q - b.steps[t].q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rrt-connect: trivial when the start satisfies the goal") {
  const RobotModel robot = panda_model();
  Rng rng(205);
  Scenario sc = easy_scenario(robot, rng);
  sc.target_e = forward_kinematics(sc.start_q, robot.dh);
  const PlanResult r = plan_rrt_connect(sc, robot, RrtConnectConfig{}, 1);
  CHECK(r.status == PlanStatus::kReached);
  CHECK(r.steps.size() == 1);
}

TEST_CASE("rrt-connect: free-space success rate and collision-free paths") {
  const RobotModel robot = panda_model();
  const DatagenConfig dg;
  RrtConnectConfig cfg;
  int success = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const Scenario sc = generate_scenario(0, derive_stream_seed(303, i), robot, dg);
    const PlanResult r = plan_rrt_connect(sc, robot, cfg, derive_stream_seed(304, i));
    if (r.status != PlanStatus::kReached) continue;
    ++success;
    // success means the goal-region FK bound holds at the path end
    CHECK((forward_kinematics(r.steps.back().q, robot.dh) - sc.target_e).norm() <
          cfg.reach_threshold);
    // postcondition replay at a finer resolution
    CHECK_FALSE(
        path_in_collision(r.joint_path(), sc.obstacles, robot.dh, robot.shape, 0.005));
  }
  CHECK(success >= 95);
}

TEST_CASE("rrt-connect: obstacle scenarios produce collision-free paths") {
  const RobotModel robot = panda_model();
  const DatagenConfig dg;
  RrtConnectConfig cfg;
  int success = 0, checked = 0;
  for (int i = 0; i < 20; ++i) {
    const Scenario sc = generate_scenario(1, derive_stream_seed(305, i), robot, dg);
    const PlanResult r = plan_rrt_connect(sc, robot, cfg, derive_stream_seed(306, i));
    ++checked;
    if (r.status != PlanStatus::kReached) continue;
    ++success;
    CHECK_FALSE(path_in_collision(r.joint_path(), sc.obstacles, robot.dh, robot.shape, 0.005));
  }
  CHECK(checked == 20);
  CHECK(success >= 15);
}

TEST_CASE("baselines: emit the planner-compatible result schema") {
  const RobotModel robot = panda_model();
  Rng rng(207);
  const Scenario sc = easy_scenario(robot, rng);
  const PlanResult r = plan_potential_field(sc, robot, PotentialFieldConfig{});
  // eval consumes baseline results exactly like LSPP ones
  const SuccessJudgement j = judge_success(r, sc, robot, 0.01);
  CHECK(j.final_distance >= 0.0);
  const NormalizedPathLength len = normalized_path_length(r, sc, robot);
  CHECK((len.degenerate || len.value >= 0.0));
}
