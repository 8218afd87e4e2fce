#include "lspp/planner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lspp/io_util.hpp"
#include "lspp/kinematics.hpp"

namespace lspp {

std::string to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::kReached: return "reached";
    case PlanStatus::kMaxSteps: return "max-steps";
    case PlanStatus::kAborted: return "aborted";
  }
  return "unknown";
}

std::vector<JointConfig> PlanResult::joint_path() const {
  std::vector<JointConfig> path;
  path.reserve(steps.size());
  for (const auto& s : steps) path.push_back(s.q);
  return path;
}

double prior_loss(const LatentVector& z) { return 0.5 * z.squaredNorm(); }

double obstacle_loss(const CollisionClassifier& c, const LatentVector& z,
                     const std::vector<Obstacle>& obstacles) {
  double loss = 0.0;
  for (const auto& o : obstacles) loss += -std::log(1.0 - c.predict_collision_prob(z, o));
  return loss;
}

double obstacle_loss_with_gradient(const CollisionClassifier& c, const LatentVector& z,
                                   const std::vector<Obstacle>& obstacles, LatentVector& grad) {
  double loss = 0.0;
  grad.setZero();
  for (const auto& o : obstacles) {
    const auto lc = c.logit_with_cache(z, o);
    const double p = sigmoid(lc.logit);
    const double p_clamped =
        std::clamp(p, CollisionClassifier::kProbClamp, 1.0 - CollisionClassifier::kProbClamp);
    loss += -std::log(1.0 - p_clamped);
    // d/dlogit of -log(1 - sigmoid(logit)) is sigmoid(logit)
    grad += c.logit_backward(lc, p);
  }
  return loss;
}

PlanResult plan(const VaeModel& vae, const CollisionClassifier* classifier,
                const Scenario& scenario, const RobotModel& robot, const PlannerConfig& config,
                std::uint64_t seed) {
  const bool use_obstacles =
      config.enable_obstacle_loss && !scenario.obstacles.empty();
  if (use_obstacles && classifier == nullptr)
    throw std::invalid_argument("plan: obstacle loss enabled but no classifier given");

  PlanResult result;
  const auto t_begin = std::chrono::steady_clock::now();

  // z0 from the posterior of the start state
  RobotState x0{scenario.start_q, forward_kinematics(scenario.start_q, robot.dh)};
  const PosteriorParams post = vae.encode(x0);
  LatentVector z;
  if (config.sample_initial_latent) {
    Rng rng(derive_stream_seed(seed, 0x9747));
    z = VaeModel::reparameterise(post, rng.normal_vector(kLatentDim));
  } else {
    z = post.mu;
  }

  GecoMultiplier geco_prior;
  geco_prior.lambda = config.lambda_init;
  geco_prior.tau_goal = config.prior_tau;
  geco_prior.alpha_ma = config.prior_alpha_ma;
  geco_prior.alpha_geco = config.geco_learning_rate;

  GecoMultiplier geco_obs;
  geco_obs.lambda = config.lambda_init;
  geco_obs.tau_goal = config.obstacle_tau;
  geco_obs.alpha_ma = config.obstacle_alpha_ma;
  geco_obs.alpha_geco = config.geco_learning_rate;

  AdamVectorState adam = AdamVectorState::zeros(kLatentDim);
  const AdamConfig adam_cfg{config.learning_rate};

  result.status = PlanStatus::kMaxSteps;
  for (int t = 0; t <= config.max_steps; ++t) {
    const VaeModel::DecodeCache dc = vae.decode_with_cache(z);

    PlanStep step;
    step.q = dc.state.q;
    step.e = dc.state.e;
    step.target_loss = (dc.state.e - scenario.target_e).norm();
    step.prior_loss = prior_loss(z);

    LatentVector obstacle_grad = LatentVector::Zero();
    step.obstacle_loss =
        use_obstacles
            ? obstacle_loss_with_gradient(*classifier, z, scenario.obstacles, obstacle_grad)
            : 0.0;

    if (step.target_loss < config.reach_threshold) {
      step.lambda_prior = geco_prior.lambda;
      step.lambda_obs = geco_obs.lambda;
      result.latents.push_back(z);
      result.steps.push_back(step);
      result.status = PlanStatus::kReached;
      break;
    }

    // Alg. order: update both multipliers, then combine the loss terms
    geco_update(geco_prior, step.prior_loss, t == 0);
    geco_update(geco_obs, step.obstacle_loss, t == 0);
    step.lambda_prior = geco_prior.lambda;
    step.lambda_obs = geco_obs.lambda;

    double total = step.target_loss;
    if (config.enable_prior_loss) total += geco_prior.lambda * step.prior_loss;
    if (use_obstacles) total += geco_obs.lambda * step.obstacle_loss;

    result.latents.push_back(z);
    result.steps.push_back(step);

    if (!std::isfinite(total)) {
      result.status = PlanStatus::kAborted;
      break;
    }
    if (t == config.max_steps) break;  // T decode steps + the final record

    // gradient of the target loss through the decoder
    VectorXd d_state = VectorXd::Zero(kStateDim);
    const double dist = step.target_loss;
    if (dist > 1e-12) d_state.tail<3>() = (dc.state.e - scenario.target_e) / dist;
    LatentVector grad = vae.decode_backward(dc, d_state);
    if (config.enable_prior_loss) grad += geco_prior.lambda * z;
    if (use_obstacles) grad += geco_obs.lambda * obstacle_grad;

    if (config.optimiser == LatentOptimiser::kAdam)
      z = adam_step(adam, adam_cfg, z, grad);
    else
      z = z - config.learning_rate * grad;
  }

  result.step_count = static_cast<int>(result.steps.size());
  result.planning_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return result;
}

void write_plan_trace_csv(const PlanResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plan trace: " + path);
  out << "t,q1,q2,q3,q4,q5,q6,q7,e1,e2,e3,target_loss,prior_loss,obstacle_loss,lambda_prior,"
         "lambda_obs\n";
  for (std::size_t t = 0; t < r.steps.size(); ++t) {
    const PlanStep& s = r.steps[t];
    out << t;
    for (int i = 0; i < 7; ++i) out << "," << format_double(s.q[i]);
    for (int i = 0; i < 3; ++i) out << "," << format_double(s.e[i]);
    out << "," << format_double(s.target_loss) << "," << format_double(s.prior_loss) << ","
        << format_double(s.obstacle_loss) << "," << format_double(s.lambda_prior) << ","
        << format_double(s.lambda_obs) << "\n";
  }
}

}  // namespace lspp
