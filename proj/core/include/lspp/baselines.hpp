#ifndef LSPP_BASELINES_HPP_
#define LSPP_BASELINES_HPP_

#include <cstdint>

#include "lspp/datagen.hpp"
#include "lspp/planner.hpp"
#include "lspp/robot_config.hpp"

namespace lspp {

/// Jacobian-pseudo-inverse artificial potential field. Repulsive magnitudes
/// follow the logistic falloff v_max / (1 + exp((d * 2 / rho - 1) * alpha)),
/// evaluated at the arm's capsule endpoints with direct access to obstacle
/// geometry (d = oracle clearance).
struct PotentialFieldConfig {
  // defaults from the built-in sweep (lspp pf-sweep) on validation scenarios
  double step_size = 0.02;          // rad per iteration scale
  double attractive_gain = 2.0;
  double repulsive_v_max = 1.0;
  double influence_radius = 0.15;   // rho, metres
  double repulsive_shape = 6.0;     // alpha_rep
  int max_iterations = 3000;
  double reach_threshold = 0.01;    // gamma, metres
  double damping = 1e-4;            // damped pseudo-inverse
  double stall_threshold = 1e-6;    // rad, max-norm of the joint update
  int stall_patience = 10;
};

PlanResult plan_potential_field(const Scenario& scenario, const RobotModel& robot,
                                const PotentialFieldConfig& config);

/// Joint-space RRT-Connect over the geometric oracle. The goal tree is rooted
/// at the scenario's hidden target configuration (no IK solver in this
/// artifact), so results are a calibration upper bound, not a fair baseline.
/// Random samples whose FK lands inside the goal region become extra goal
/// roots.
struct RrtConnectConfig {
  int max_samples = 4000;
  double step_size = 0.3;           // rad, max-norm
  double edge_resolution = 0.02;    // rad, collision-check resolution
  double reach_threshold = 0.01;    // gamma, metres (goal-region check)
};

PlanResult plan_rrt_connect(const Scenario& scenario, const RobotModel& robot,
                            const RrtConnectConfig& config, std::uint64_t seed);

}  // namespace lspp

#endif  // LSPP_BASELINES_HPP_
