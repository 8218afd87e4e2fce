#ifndef LSPP_DATAGEN_HPP_
#define LSPP_DATAGEN_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lspp/robot_config.hpp"
#include "lspp/rng.hpp"
#include "lspp/types.hpp"

namespace lspp {

/// A valid training state: in joint limits, free of self and table collision.
struct StateSample {
  JointConfig q;
  EEPosition e;  // = FK(q)

  Eigen::Matrix<double, kStateDim, 1> stacked() const {
    Eigen::Matrix<double, kStateDim, 1> x;
    x << q, e;
    return x;
  }
};

struct LabeledCollisionSample {
  StateSample state;
  Obstacle obstacle;
  int label = 0;  // 1 = arm in collision with the obstacle
};

/// Planning problem: start configuration, target position and obstacles.
/// target_q_hidden generated the target position and is not given to the
/// planner; it also roots the RRT-Connect goal tree (calibration use).
struct Scenario {
  std::uint64_t seed = 0;
  JointConfig start_q;
  EEPosition target_e;
  JointConfig target_q_hidden;
  std::vector<Obstacle> obstacles;
};

struct DatagenConfig {
  // Obstacle sampling ranges; chosen to intersect the workspace.
  double distance_min = 0.2;  // planar distance of cylinder axis to base, metres
  double distance_max = 0.9;
  double height_min = 0.1;
  double height_max = 0.8;
  double radius_min = 0.03;
  double radius_max = 0.15;
  // Segment placement between start and target positions.
  double segment_u_min = 0.25;
  double segment_u_max = 0.75;
  double segment_jitter = 0.1;  // metres, lateral
  int rejection_budget = 10000;
};

/// Uniform q within limits, rejection-sampled against self/table collision.
/// Throws when the rejection budget runs out. `attempts` (optional) reports
/// the number of draws used.
StateSample sample_state(Rng& stream, const RobotModel& robot, const DatagenConfig& cfg,
                         int* attempts = nullptr);

/// theta ~ U[0, 2pi), L ~ U[distance_min, distance_max], x = L cos theta,
/// y = L sin theta; h and r uniform in their ranges.
Obstacle sample_obstacle(Rng& stream, const DatagenConfig& cfg);

/// One independent stream per sample index; identical output for any job count.
std::vector<StateSample> generate_state_dataset(int n, std::uint64_t seed, const RobotModel& robot,
                                                const DatagenConfig& cfg, int jobs = 1);

/// n/2 colliding and n/2 non-colliding (state, obstacle) pairs, labels from
/// the geometric oracle. n must be even.
std::vector<LabeledCollisionSample> generate_collision_dataset(int n, std::uint64_t seed,
                                                               const RobotModel& robot,
                                                               const DatagenConfig& cfg,
                                                               int jobs = 1);

/// Start/target states plus k obstacles, none of which may collide with the
/// start or the (hidden) target configuration. The first obstacle is placed
/// near the start-to-target segment; later ones are segment-placed or fully
/// random with probability 1/2 each.
Scenario generate_scenario(int k_obstacles, std::uint64_t seed, const RobotModel& robot,
                           const DatagenConfig& cfg);

std::vector<Scenario> generate_scenarios(int k_obstacles, int n, std::uint64_t base_seed,
                                         const RobotModel& robot, const DatagenConfig& cfg,
                                         int jobs = 1);

/// Decoded joint path produced by a planner for a scenario.
using PlannedPathFn = std::function<std::vector<JointConfig>(const Scenario&)>;

/// Keeps the scenarios whose obstacle-loss-free plan hits an obstacle
/// (order preserving). The callback must run the planner with the obstacle
/// loss disabled and return the decoded joint path.
std::vector<Scenario> filter_am_relevant(const std::vector<Scenario>& scenarios,
                                         const PlannedPathFn& plan_without_obstacle_loss,
                                         const RobotModel& robot, double resolution = 0.02);

// ---- file formats ----

void write_state_csv(const std::vector<StateSample>& samples, const std::string& path);
std::vector<StateSample> read_state_csv(const std::string& path);

void write_collision_csv(const std::vector<LabeledCollisionSample>& samples,
                         const std::string& path);
std::vector<LabeledCollisionSample> read_collision_csv(const std::string& path);

void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

/// Manifest: scenario seeds per obstacle count, enough to regenerate a suite.
struct ScenarioManifest {
  std::map<int, std::vector<std::uint64_t>> seeds_per_k;
};
void save_manifest(const ScenarioManifest& m, const std::string& path);
ScenarioManifest load_manifest(const std::string& path);

/// Re-validates stored labels against the geometric oracle (label integrity).
/// Returns the number of mismatches.
int validate_collision_labels(const std::vector<LabeledCollisionSample>& samples,
                              const RobotModel& robot);

/// Leading-fraction split (default 80/20 train/validation).
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_validation(const std::vector<T>& data,
                                                                 double train_fraction = 0.8) {
  const auto cut = static_cast<std::size_t>(train_fraction * static_cast<double>(data.size()));
  return {std::vector<T>(data.begin(), data.begin() + cut),
          std::vector<T>(data.begin() + cut, data.end())};
}

MatrixXd states_to_matrix(const std::vector<StateSample>& samples);  // 10 x n

}  // namespace lspp

#endif  // LSPP_DATAGEN_HPP_
