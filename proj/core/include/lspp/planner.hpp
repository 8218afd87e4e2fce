#ifndef LSPP_PLANNER_HPP_
#define LSPP_PLANNER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lspp/classifier.hpp"
#include "lspp/datagen.hpp"
#include "lspp/geco.hpp"
#include "lspp/robot_config.hpp"
#include "lspp/types.hpp"
#include "lspp/vae.hpp"

namespace lspp {

enum class LatentOptimiser { kAdam, kPlainGradient };

struct PlannerConfig {
  double learning_rate = 0.03;       // alpha_AM
  int max_steps = 300;               // T
  double reach_threshold = 0.01;     // gamma, metres
  double geco_learning_rate = 0.01;  // alpha_GECO, shared by both multipliers
  double prior_tau = 0.9;
  double prior_alpha_ma = 0.95;
  double obstacle_tau = 0.7;
  double obstacle_alpha_ma = 0.4;
  double lambda_init = 1.0;
  bool enable_prior_loss = true;
  bool enable_obstacle_loss = true;
  LatentOptimiser optimiser = LatentOptimiser::kAdam;
  /// Draw z0 from the posterior instead of using its mean.
  bool sample_initial_latent = false;
};

enum class PlanStatus { kReached, kMaxSteps, kAborted };

std::string to_string(PlanStatus s);

struct PlanStep {
  JointConfig q;
  EEPosition e;  // decoded position (baselines: ground-truth FK)
  double target_loss = 0.0;
  double prior_loss = 0.0;
  double obstacle_loss = 0.0;
  double lambda_prior = 0.0;
  double lambda_obs = 0.0;
};

struct PlanResult {
  std::vector<LatentVector> latents;  // empty for the geometric baselines
  std::vector<PlanStep> steps;
  PlanStatus status = PlanStatus::kAborted;
  double planning_seconds = 0.0;
  int step_count = 0;  // decode steps taken = steps.size()

  std::vector<JointConfig> joint_path() const;
};

/// -log p(z) under the isotropic Gaussian prior, additive constant dropped:
/// 0.5 * |z|^2. Gradient is z.
double prior_loss(const LatentVector& z);

/// Sum over obstacles of -log(1 - p(z, o)), probabilities clamped to
/// [1e-7, 1 - 1e-7].
double obstacle_loss(const CollisionClassifier& c, const LatentVector& z,
                     const std::vector<Obstacle>& obstacles);

/// Obstacle loss together with its gradient w.r.t. z (classifier backward,
/// summed over obstacles).
double obstacle_loss_with_gradient(const CollisionClassifier& c, const LatentVector& z,
                                   const std::vector<Obstacle>& obstacles, LatentVector& grad);

/// Activation-maximisation planning: iteratively decode z, balance target /
/// prior / obstacle losses with per-term GECO multipliers and step z against
/// the combined input gradient. The classifier may be null when the obstacle
/// loss is disabled or the scenario has no obstacles.
PlanResult plan(const VaeModel& vae, const CollisionClassifier* classifier,
                const Scenario& scenario, const RobotModel& robot, const PlannerConfig& config,
                std::uint64_t seed = 0);

/// Plan trace: t,q1..q7,e1,e2,e3,target_loss,prior_loss,obstacle_loss,
/// lambda_prior,lambda_obs. No timing column, so traces are reproducible.
void write_plan_trace_csv(const PlanResult& r, const std::string& path);

}  // namespace lspp

#endif  // LSPP_PLANNER_HPP_
