#include <doctest.h>

#include <cmath>

#include "lspp/kinematics.hpp"
#include "lspp/robot_config.hpp"
#include "lspp/rng.hpp"
#include "oracles.hpp"

using namespace lspp;

namespace {

// Golden flange positions pinned from the independent matrix-chain oracle
// (tests/oracles.hpp), not asserted by hand.
constexpr double kGoldenZero[3] = {0.087999999999999995, 0.0, 0.92599999999999993};
constexpr double kGoldenReady[3] = {0.30689056659294117, 0.0, 0.59028205230283926};
constexpr double kGoldenProbe[3] = {0.50152540776519794, -0.012240114534398744,
                                    0.27058160869647335};

JointConfig ready_pose() {
  JointConfig q;
  q << 0.0, -M_PI_4, 0.0, -3.0 * M_PI_4, 0.0, M_PI_2, M_PI_4;
  return q;
}

JointConfig probe_pose() {
  JointConfig q;
  q << 0.3, 0.5, -0.4, -1.8, 0.2, 1.1, -0.6;
  return q;
}

JointConfig random_in_limits(Rng& rng, const JointLimits& lim) {
  JointConfig q;
  for (int i = 0; i < 7; ++i) q[i] = rng.uniform(lim.lower[i], lim.upper[i]);
  return q;
}

std::array<double, 7> to_array(const JointConfig& q) {
  std::array<double, 7> a;
  for (int i = 0; i < 7; ++i) a[i] = q[i];
  return a;
}

}  // namespace

TEST_CASE("link_frames: zero configuration") {
  const RobotModel robot = panda_model();
  const JointConfig q = JointConfig::Zero();
  const auto frames = link_frames(q, robot.dh);

  REQUIRE(frames.size() == 9);
  CHECK(frames[0].matrix().isApprox(Eigen::Matrix4d::Identity(), 1e-15));

  const Vector3d flange = frames.back().translation();
  CHECK(std::abs(flange.x() - kGoldenZero[0]) < 1e-9);
  CHECK(std::abs(flange.y() - kGoldenZero[1]) < 1e-9);
  CHECK(std::abs(flange.z() - kGoldenZero[2]) < 1e-9);
}

TEST_CASE("link_frames: chain locality under q7 perturbation") {
  const RobotModel robot = panda_model();
  Rng rng(11);
  JointConfig q = random_in_limits(rng, robot.limits);
  JointConfig q2 = q;
  q2[6] += 0.37;

  const auto f1 = link_frames(q, robot.dh);
  const auto f2 = link_frames(q2, robot.dh);
  for (int i = 0; i <= 6; ++i)  // base..joint 6 frames unaffected
    CHECK((f1[i].matrix() - f2[i].matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f1[7].matrix() - f2[7].matrix()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("forward_kinematics: golden values from the matrix-chain oracle") {
  const RobotModel robot = panda_model();

  const EEPosition e_ready = forward_kinematics(ready_pose(), robot.dh);
  CHECK(std::abs(e_ready.x() - kGoldenReady[0]) < 1e-9);
  CHECK(std::abs(e_ready.y() - kGoldenReady[1]) < 1e-9);
  CHECK(std::abs(e_ready.z() - kGoldenReady[2]) < 1e-9);

  const EEPosition e_probe = forward_kinematics(probe_pose(), robot.dh);
  CHECK(std::abs(e_probe.x() - kGoldenProbe[0]) < 1e-9);
  CHECK(std::abs(e_probe.y() - kGoldenProbe[1]) < 1e-9);
  CHECK(std::abs(e_probe.z() - kGoldenProbe[2]) < 1e-9);

  // the oracle itself must reproduce its pinned values
  const auto oracle_ready = oracle::fk_position(to_array(ready_pose()));
  CHECK(std::abs(oracle_ready[0] - kGoldenReady[0]) < 1e-12);
  CHECK(std::abs(oracle_ready[2] - kGoldenReady[2]) < 1e-12);
}

TEST_CASE("forward_kinematics: agrees with the oracle on random configurations") {
  const RobotModel robot = panda_model();
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const JointConfig q = random_in_limits(rng, robot.limits);
    const EEPosition e = forward_kinematics(q, robot.dh);
    const auto eo = oracle::fk_position(to_array(q));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e[i] - eo[i]) < 1e-12);
  }
}

TEST_CASE("forward_kinematics: base yaw symmetry and q7 invariance") {
  const RobotModel robot = panda_model();
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const JointConfig q = random_in_limits(rng, robot.limits);
    const EEPosition e = forward_kinematics(q, robot.dh);

    // rotating q1 by phi rotates e about the base z axis
    const double phi = rng.uniform(-1.0, 1.0);
    JointConfig q_yaw = q;
    q_yaw[0] = q[0] + phi;
    const EEPosition e_yaw = forward_kinematics(q_yaw, robot.dh);
    CHECK(std::abs(e_yaw.z() - e.z()) < 1e-12);
    CHECK(std::abs(e_yaw.head<2>().norm() - e.head<2>().norm()) < 1e-12);
    const Eigen::Rotation2Dd rot(phi);
    const Eigen::Vector2d rotated = rot * e.head<2>();
    CHECK((rotated - e_yaw.head<2>()).norm() < 1e-12);

    // the flange origin lies on the joint-7 axis
    JointConfig q_wrist = q;
    q_wrist[6] = q[6] + rng.uniform(-2.0, 2.0);
    const EEPosition e_wrist = forward_kinematics(q_wrist, robot.dh);
    CHECK((e_wrist - e).norm() < 1e-12);
  }
}

TEST_CASE("positional_jacobian: column 7 is zero") {
  const RobotModel robot = panda_model();
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const JointConfig q = random_in_limits(rng, robot.limits);
    const auto jac = positional_jacobian(q, robot.dh);
    CHECK(jac.col(6).norm() < 1e-14);
  }
}

TEST_CASE("positional_jacobian: matches finite differences") {
  const RobotModel robot = panda_model();
  Rng rng(31);
  const double step = 1e-6;

  auto check_at = [&](const JointConfig& q) {
    const auto jac = positional_jacobian(q, robot.dh);
    for (int j = 0; j < 7; ++j) {
      JointConfig qp = q, qm = q;
      qp[j] += step;
      qm[j] -= step;
      const Vector3d fd =
          (forward_kinematics(qp, robot.dh) - forward_kinematics(qm, robot.dh)) / (2.0 * step);
      CHECK((jac.col(j) - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
  };

  check_at(JointConfig::Zero());
  for (int trial = 0; trial < 10; ++trial) check_at(random_in_limits(rng, robot.limits));
}

TEST_CASE("within_limits: boundary conventions") {
  const RobotModel robot = panda_model();
  const JointLimits& lim = robot.limits;

  CHECK(within_limits(0.5 * (lim.lower + lim.upper), lim));
  CHECK(within_limits(lim.lower, lim));  // closed interval
  CHECK(within_limits(lim.upper, lim));

  JointConfig q = 0.5 * (lim.lower + lim.upper);
  q[3] = lim.upper[3] + 0.01;
  CHECK_FALSE(within_limits(q, lim));
}

TEST_CASE("kinematics invariants: FK-Jacobian consistency") {
  const RobotModel robot = panda_model();
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const JointConfig q = random_in_limits(rng, robot.limits);
    JointConfig dq = rng.normal_vector(7);
    dq *= 1e-4 / dq.norm();
    const auto jac = positional_jacobian(q, robot.dh);
    const Vector3d lin = jac * dq;
    const Vector3d actual = forward_kinematics(q + dq, robot.dh) - forward_kinematics(q, robot.dh);
    CHECK((lin - actual).norm() <= 1e-8 + 10.0 * dq.squaredNorm());
  }
}

TEST_CASE("kinematics invariants: reach bound over random in-limit configurations") {
  const RobotModel robot = panda_model();
  Rng rng(41);
  double max_reach = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const JointConfig q = random_in_limits(rng, robot.limits);
    max_reach = std::max(max_reach, forward_kinematics(q, robot.dh).norm());
  }
  CHECK(max_reach <= robot.reach_bound);
}
