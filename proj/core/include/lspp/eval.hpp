#ifndef LSPP_EVAL_HPP_
#define LSPP_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lspp/datagen.hpp"
#include "lspp/planner.hpp"
#include "lspp/robot_config.hpp"
#include "lspp/vae.hpp"

namespace lspp {

struct SuccessJudgement {
  bool success = false;
  double final_distance = 0.0;  // ground-truth FK of the final decoded joints
  bool collided = false;
};

/// Success = final FK distance below the threshold and a collision-free
/// decoded joint path. Distance uses FK(q_final), not the decoder's e-output,
/// so sample inconsistency shows up as failure instead of hiding.
SuccessJudgement judge_success(const PlanResult& plan, const Scenario& scenario,
                               const RobotModel& robot, double threshold,
                               double collision_resolution = 0.02);

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
  double center = 0.0;
  double half_width = 0.0;
};

/// Wilson score interval, z = 1.959963984540054 at 95% confidence.
WilsonInterval wilson_interval(int successes, int n, double confidence = 0.95);

/// Cartesian path length over ground-truth FK divided by the straight-line
/// start-to-target distance. Degenerate denominators (< 1e-6 m) are flagged.
struct NormalizedPathLength {
  double value = 0.0;
  bool degenerate = false;
};
NormalizedPathLength normalized_path_length(const PlanResult& plan, const Scenario& scenario,
                                            const RobotModel& robot);

struct SampleConsistencySummary {
  std::vector<double> deltas;  // per sample, metres
  double median = 0.0;
  double p95 = 0.0;
  double mean = 0.0;
};

/// delta = |e_hat - FK(q_hat)| per decoded sample.
SampleConsistencySummary sample_consistency(const VaeModel& vae,
                                            const std::vector<RobotState>& samples,
                                            const RobotModel& robot);

/// Histogram CSV: bin_low,bin_high,count (fixed-width bins over [0, max]).
void write_delta_histogram_csv(const SampleConsistencySummary& s, int bins,
                               const std::string& path);

struct DynamicFeasibilityReport {
  Vector7d max_velocity = Vector7d::Zero();
  Vector7d max_acceleration = Vector7d::Zero();
  Vector7d max_jerk = Vector7d::Zero();
  bool velocity_available = false;
  bool acceleration_available = false;
  bool jerk_available = false;
  bool velocity_violation = false;
  bool acceleration_violation = false;
  bool jerk_violation = false;

  bool any_violation() const {
    return velocity_violation || acceleration_violation || jerk_violation;
  }
};

/// Finite differences of the joint path executed at the given control
/// frequency. Plans with fewer than 4 states get a velocity-only report.
DynamicFeasibilityReport dynamic_feasibility(const PlanResult& plan, const JointLimits& limits,
                                             double frequency_hz = 50.0);

void write_dynamic_feasibility_csv(const std::vector<DynamicFeasibilityReport>& reports,
                                   const std::string& path);

struct PcaProjection {
  Eigen::Matrix<double, 7, 2> components;  // top-2 eigenvectors (columns)
  Vector7d mean = Vector7d::Zero();
  Eigen::Vector2d variances = Eigen::Vector2d::Zero();  // top-2 eigenvalues
  MatrixXd projected_training;                          // 2 x n
  std::vector<MatrixXd> projected_trajectories;         // 2 x len each
};

/// PCA of posterior-mean training latents; trajectories projected onto the
/// top-2 components.
PcaProjection pca_projection(const VaeModel& vae, const MatrixXd& training_states,
                             const std::vector<std::vector<LatentVector>>& trajectories);

/// Same, starting from raw latents (7 x n). Component signs are canonical:
/// the largest-magnitude entry of each eigenvector is positive.
PcaProjection pca_of_latents(const MatrixXd& latents,
                             const std::vector<std::vector<LatentVector>>& trajectories);

void write_pca_csv(const PcaProjection& p, const std::string& path);

struct ScenarioRow {
  int index = 0;
  std::string planner;
  std::uint64_t seed = 0;
  int k_obstacles = 0;
  bool success = false;
  double final_distance = 0.0;
  bool collided = false;
  int steps = 0;
  double wall_seconds = 0.0;
  double normalized_path_length = 0.0;
  bool degenerate_length = false;
  double min_decoded_distance = 0.0;  // min over steps of |e_hat - target|
  double final_delta = 0.0;           // |e_hat_T - FK(q_hat_T)|, sample consistency at the end
  std::string status;
};

struct Aggregate {
  std::string planner;
  int k_obstacles = 0;
  int n = 0;
  int successes = 0;
  WilsonInterval success_interval;
  double mean_path_length = 0.0;  // successes with valid denominators only
  double std_path_length = 0.0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

struct EvalReport {
  std::vector<ScenarioRow> rows;
  std::vector<Aggregate> aggregates;
};

using PlanFn = std::function<PlanResult(const Scenario&, std::uint64_t seed)>;

struct BenchmarkConfig {
  double success_threshold = 0.01;  // metres
  double collision_resolution = 0.02;
  int jobs = 1;
};

/// Runs one planner over a scenario suite; wall time covers only the planning
/// call. Rows are ordered by scenario index regardless of job count.
EvalReport run_benchmark(const std::string& planner_name, const PlanFn& planner,
                         const std::vector<Scenario>& scenarios, int k_obstacles,
                         const RobotModel& robot, const BenchmarkConfig& cfg);

/// Merges rows from several runs and recomputes aggregates.
EvalReport merge_reports(const std::vector<EvalReport>& reports);

void write_report_csv(const EvalReport& r, const std::string& path);
/// Correlation data behind the min-distance-vs-consistency analysis.
void write_min_distance_scatter_csv(const EvalReport& r, const std::string& path);
/// summary.json: aggregates plus config/checkpoint fingerprints.
void write_summary_json(const EvalReport& r, const std::string& resolved_config,
                        const std::vector<std::pair<std::string, std::string>>& fingerprints,
                        const std::string& path);

std::vector<Aggregate> compute_aggregates(const std::vector<ScenarioRow>& rows);

double median(std::vector<double> values);
double percentile(std::vector<double> values, double p);

}  // namespace lspp

#endif  // LSPP_EVAL_HPP_
