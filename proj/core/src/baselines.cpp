#include "lspp/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "lspp/geometry.hpp"
#include "lspp/kinematics.hpp"

namespace lspp {

namespace {

PlanStep fk_step(const JointConfig& q, const DhTable& dh) {
  PlanStep s;
  s.q = q;
  s.e = forward_kinematics(q, dh);
  return s;
}

/// Unit direction pointing away from the solid cylinder at p. Inside the
/// cylinder, points along the smallest escape depth.
Vector3d cylinder_outward_direction(const Vector3d& p, const Obstacle& o) {
  Vector3d radial(p.x() - o.x, p.y() - o.y, 0.0);
  const double rn = radial.norm();
  const Vector3d lateral = rn > 1e-12 ? Vector3d(radial / rn) : Vector3d::UnitX();
  const double dr = rn - o.r;
  const double below = -p.z();
  const double above = p.z() - o.h;

  if (dr <= 0.0 && below <= 0.0 && above <= 0.0) {
    // inside: escape through the nearest face
    const double lateral_depth = -dr;
    const double top_depth = -above;
    const double bottom_depth = -below;
    if (lateral_depth <= top_depth && lateral_depth <= bottom_depth) return lateral;
    return top_depth <= bottom_depth ? Vector3d::UnitZ() : Vector3d(-Vector3d::UnitZ());
  }
  Vector3d dir = Vector3d::Zero();
  if (dr > 0.0) dir += dr * lateral;
  if (above > 0.0) dir += Vector3d(0.0, 0.0, above);
  if (below > 0.0) dir += Vector3d(0.0, 0.0, -below);
  const double n = dir.norm();
  return n > 1e-12 ? Vector3d(dir / n) : lateral;
}

}  // namespace

PlanResult plan_potential_field(const Scenario& scenario, const RobotModel& robot,
                                const PotentialFieldConfig& cfg) {
  PlanResult result;
  const auto t_begin = std::chrono::steady_clock::now();

  JointConfig q = scenario.start_q;
  result.status = PlanStatus::kMaxSteps;
  int stall_count = 0;

  for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
    result.steps.push_back(fk_step(q, robot.dh));
    const Vector3d e = result.steps.back().e;
    const Vector3d err = scenario.target_e - e;
    if (err.norm() < cfg.reach_threshold) {
      result.status = PlanStatus::kReached;
      break;
    }
    if (iter == cfg.max_iterations) break;

    Vector3d velocity = cfg.attractive_gain * err;

    if (!scenario.obstacles.empty()) {
      const auto capsules = arm_capsules(q, robot.dh, robot.shape);
      for (const auto& cap : capsules) {
        for (const Vector3d& point : {cap.p0, cap.p1}) {
          for (const auto& o : scenario.obstacles) {
            const double d = point_cylinder_distance(point, o) - cap.radius;
            if (d > cfg.influence_radius) continue;
            const double v = cfg.repulsive_v_max /
                             (1.0 + std::exp((d * 2.0 / cfg.influence_radius - 1.0) *
                                             cfg.repulsive_shape));
            velocity += v * cylinder_outward_direction(point, o);
          }
        }
      }
    }

    // damped pseudo-inverse: J^T (J J^T + damping^2 I)^-1
    const Eigen::Matrix<double, 3, 7> jac = positional_jacobian(q, robot.dh);
    const Eigen::Matrix3d jjt =
        jac * jac.transpose() + cfg.damping * cfg.damping * Eigen::Matrix3d::Identity();
    const Vector7d dq = cfg.step_size * (jac.transpose() * jjt.ldlt().solve(velocity));

    q += dq;
    q = q.cwiseMax(robot.limits.lower).cwiseMin(robot.limits.upper);

    if (dq.cwiseAbs().maxCoeff() < cfg.stall_threshold) {
      if (++stall_count >= cfg.stall_patience) break;
    } else {
      stall_count = 0;
    }
  }

  result.step_count = static_cast<int>(result.steps.size());
  result.planning_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return result;
}

namespace {

struct Tree {
  std::vector<JointConfig> nodes;
  std::vector<int> parent;  // -1 for roots

  int add(const JointConfig& q, int par) {
    nodes.push_back(q);
    parent.push_back(par);
    return static_cast<int>(nodes.size()) - 1;
  }

  int nearest(const JointConfig& q) const {
    int best = 0;
    double best_d = (nodes[0] - q).squaredNorm();
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double d = (nodes[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  std::vector<JointConfig> path_to_root(int idx) const {
    std::vector<JointConfig> path;
    for (int i = idx; i >= 0; i = parent[i]) path.push_back(nodes[i]);
    return path;  // node..root order
  }
};

JointConfig steer(const JointConfig& from, const JointConfig& to, double step) {
  const JointConfig delta = to - from;
  const double span = delta.cwiseAbs().maxCoeff();
  if (span <= step) return to;
  return from + (step / span) * delta;
}

}  // namespace

PlanResult plan_rrt_connect(const Scenario& scenario, const RobotModel& robot,
                            const RrtConnectConfig& cfg, std::uint64_t seed) {
  PlanResult result;
  const auto t_begin = std::chrono::steady_clock::now();
  Rng rng(seed);

  const auto collides = [&](const JointConfig& q) {
    return arm_in_collision(q, scenario.obstacles, robot.dh, robot.shape).any();
  };
  const auto edge_free = [&](const JointConfig& a, const JointConfig& b) {
    return !path_in_collision({a, b}, scenario.obstacles, robot.dh, robot.shape,
                              cfg.edge_resolution);
  };

  result.status = PlanStatus::kMaxSteps;
  const auto finish = [&](std::vector<JointConfig> path) {
    for (const auto& q : path) result.steps.push_back(fk_step(q, robot.dh));
    result.step_count = static_cast<int>(result.steps.size());
    result.planning_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
  };

  // degenerate: the start already satisfies the goal region
  if ((forward_kinematics(scenario.start_q, robot.dh) - scenario.target_e).norm() <
      cfg.reach_threshold) {
    result.status = PlanStatus::kReached;
    return finish({scenario.start_q});
  }

  Tree start_tree, goal_tree;
  start_tree.add(scenario.start_q, -1);
  goal_tree.add(scenario.target_q_hidden, -1);

  Tree* ta = &start_tree;
  Tree* tb = &goal_tree;
  bool a_is_start = true;

  for (int it = 0; it < cfg.max_samples; ++it) {
    JointConfig q_rand;
    for (int i = 0; i < kNumJoints; ++i)
      q_rand[i] = rng.uniform(robot.limits.lower[i], robot.limits.upper[i]);

    // IK-free goal sampling: lucky draws that land in the goal region become
    // additional goal roots.
    if ((forward_kinematics(q_rand, robot.dh) - scenario.target_e).norm() < cfg.reach_threshold &&
        !collides(q_rand))
      goal_tree.add(q_rand, -1);

    const int near_a = ta->nearest(q_rand);
    const JointConfig q_new = steer(ta->nodes[near_a], q_rand, cfg.step_size);
    if (!collides(q_new) && edge_free(ta->nodes[near_a], q_new)) {
      const int new_a = ta->add(q_new, near_a);

      // greedy connect from the other tree
      int near_b = tb->nearest(q_new);
      int last_b = near_b;
      bool connected = false;
      while (true) {
        const JointConfig q_step = steer(tb->nodes[last_b], q_new, cfg.step_size);
        if (collides(q_step) || !edge_free(tb->nodes[last_b], q_step)) break;
        last_b = tb->add(q_step, last_b);
        if ((q_step - q_new).cwiseAbs().maxCoeff() < 1e-12) {
          connected = true;
          break;
        }
      }
      if (connected) {
        auto path_a = ta->path_to_root(new_a);    // q_new .. start-or-goal root
        auto path_b = tb->path_to_root(last_b);   // q_new .. other root
        std::reverse(path_a.begin(), path_a.end());  // root .. q_new
        path_b.erase(path_b.begin());                // drop duplicate q_new
        std::vector<JointConfig> path = std::move(path_a);
        path.insert(path.end(), path_b.begin(), path_b.end());
        if (!a_is_start) std::reverse(path.begin(), path.end());
        result.status = PlanStatus::kReached;
        return finish(std::move(path));
      }
    }
    std::swap(ta, tb);
    a_is_start = !a_is_start;
  }
  return finish({scenario.start_q});
}

}  // namespace lspp
