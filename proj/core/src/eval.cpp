#include "lspp/eval.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "lspp/geometry.hpp"
#include "lspp/io_util.hpp"
#include "lspp/kinematics.hpp"

namespace lspp {

SuccessJudgement judge_success(const PlanResult& plan, const Scenario& scenario,
                               const RobotModel& robot, double threshold,
                               double collision_resolution) {
  if (plan.steps.empty()) throw std::invalid_argument("judge_success: empty plan");
  SuccessJudgement j;
  const JointConfig q_final = plan.steps.back().q;
  j.final_distance = (forward_kinematics(q_final, robot.dh) - scenario.target_e).norm();
  j.collided = path_in_collision(plan.joint_path(), scenario.obstacles, robot.dh, robot.shape,
                                 collision_resolution);
  j.success = j.final_distance < threshold && !j.collided;
  return j;
}

WilsonInterval wilson_interval(int successes, int n, double confidence) {
  if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
  if (successes < 0 || successes > n)
    throw std::invalid_argument("wilson_interval: successes out of range");
  double z = 1.959963984540054;  // 95% two-sided normal quantile
  if (std::abs(confidence - 0.95) > 1e-9) {
    // inverse normal CDF via Newton on the error function (rarely used path)
    double lo = 0.0, hi = 10.0;
    const double target = 0.5 * (1.0 + confidence);
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (0.5 * (1.0 + std::erf(mid / std::sqrt(2.0))) < target)
        lo = mid;
      else
        hi = mid;
    }
    z = 0.5 * (lo + hi);
  }
  const double nn = n;
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  WilsonInterval w;
  w.center = (p + z2 / (2.0 * nn)) / denom;
  w.half_width = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  w.low = std::max(0.0, w.center - w.half_width);
  w.high = std::min(1.0, w.center + w.half_width);
  // the bounds coincide with 0/1 algebraically at the extremes; make that
  // exact instead of leaving an ulp of slack
  if (successes == 0) w.low = 0.0;
  if (successes == n) w.high = 1.0;
  return w;
}

NormalizedPathLength normalized_path_length(const PlanResult& plan, const Scenario& scenario,
                                            const RobotModel& robot) {
  if (plan.steps.empty()) throw std::invalid_argument("normalized_path_length: empty plan");
  NormalizedPathLength out;
  const Vector3d e0 = forward_kinematics(plan.steps.front().q, robot.dh);
  const double denom = (e0 - scenario.target_e).norm();
  if (denom < 1e-6) {
    out.degenerate = true;
    return out;
  }
  double length = 0.0;
  Vector3d prev = e0;
  for (std::size_t t = 1; t < plan.steps.size(); ++t) {
    const Vector3d cur = forward_kinematics(plan.steps[t].q, robot.dh);
    length += (cur - prev).norm();
    prev = cur;
  }
  out.value = length / denom;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + mid - 1, values.end());
    m = 0.5 * (m + values[mid - 1]);
  }
  return m;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double idx = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = idx - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

SampleConsistencySummary sample_consistency(const VaeModel& vae,
                                            const std::vector<RobotState>& samples,
                                            const RobotModel& robot) {
  (void)vae;  // deltas depend only on the decoded pairs; kept for symmetry
  SampleConsistencySummary s;
  s.deltas.reserve(samples.size());
  double sum = 0.0;
  for (const auto& st : samples) {
    const double d = (st.e - forward_kinematics(st.q, robot.dh)).norm();
    s.deltas.push_back(d);
    sum += d;
  }
  if (!s.deltas.empty()) {
    s.median = median(s.deltas);
    s.p95 = percentile(s.deltas, 0.95);
    s.mean = sum / s.deltas.size();
  }
  return s;
}

void write_delta_histogram_csv(const SampleConsistencySummary& s, int bins,
                               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write histogram: " + path);
  const double max_delta =
      s.deltas.empty() ? 0.0 : *std::max_element(s.deltas.begin(), s.deltas.end());
  const double width = max_delta > 0.0 ? max_delta / bins : 1.0;
  std::vector<int> counts(bins, 0);
  for (double d : s.deltas) {
    int b = std::min(static_cast<int>(d / width), bins - 1);
    counts[b] += 1;
  }
  out << "bin_low,bin_high,count\n";
  for (int b = 0; b < bins; ++b)
    out << format_double(b * width) << "," << format_double((b + 1) * width) << "," << counts[b]
        << "\n";
}

DynamicFeasibilityReport dynamic_feasibility(const PlanResult& plan, const JointLimits& limits,
                                             double frequency_hz) {
  if (frequency_hz <= 0.0) throw std::invalid_argument("dynamic_feasibility: bad frequency");
  DynamicFeasibilityReport r;
  const auto& steps = plan.steps;
  const std::size_t n = steps.size();
  const double dt = 1.0 / frequency_hz;

  if (n >= 2) {
    r.velocity_available = true;
    for (std::size_t t = 0; t + 1 < n; ++t) {
      const Vector7d v = (steps[t + 1].q - steps[t].q) / dt;
      r.max_velocity = r.max_velocity.cwiseMax(v.cwiseAbs());
    }
  }
  if (n >= 4) {
    r.acceleration_available = true;
    for (std::size_t t = 0; t + 2 < n; ++t) {
      const Vector7d a = (steps[t + 2].q - 2.0 * steps[t + 1].q + steps[t].q) / (dt * dt);
      r.max_acceleration = r.max_acceleration.cwiseMax(a.cwiseAbs());
    }
    r.jerk_available = true;
    for (std::size_t t = 0; t + 3 < n; ++t) {
      const Vector7d jk =
          (steps[t + 3].q - 3.0 * steps[t + 2].q + 3.0 * steps[t + 1].q - steps[t].q) /
          (dt * dt * dt);
      r.max_jerk = r.max_jerk.cwiseMax(jk.cwiseAbs());
    }
  }
  r.velocity_violation =
      r.velocity_available && (r.max_velocity.array() > limits.velocity.array()).any();
  r.acceleration_violation =
      r.acceleration_available && (r.max_acceleration.array() > limits.acceleration.array()).any();
  r.jerk_violation = r.jerk_available && (r.max_jerk.array() > limits.jerk.array()).any();
  return r;
}

void write_dynamic_feasibility_csv(const std::vector<DynamicFeasibilityReport>& reports,
                                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dyn_feas csv: " + path);
  out << "plan";
  for (int i = 1; i <= 7; ++i) out << ",max_vel_q" << i;
  for (int i = 1; i <= 7; ++i) out << ",max_acc_q" << i;
  for (int i = 1; i <= 7; ++i) out << ",max_jerk_q" << i;
  out << ",violation\n";
  for (std::size_t p = 0; p < reports.size(); ++p) {
    out << p;
    for (int i = 0; i < 7; ++i) out << "," << format_double(reports[p].max_velocity[i]);
    for (int i = 0; i < 7; ++i) out << "," << format_double(reports[p].max_acceleration[i]);
    for (int i = 0; i < 7; ++i) out << "," << format_double(reports[p].max_jerk[i]);
    out << "," << (reports[p].any_violation() ? 1 : 0) << "\n";
  }
}

PcaProjection pca_of_latents(const MatrixXd& latents,
                             const std::vector<std::vector<LatentVector>>& trajectories) {
  if (latents.rows() != kLatentDim)
    throw std::invalid_argument("pca_of_latents: latents must be 7 x n");
  const Eigen::Index n = latents.cols();
  if (n < 2) throw std::invalid_argument("pca_of_latents: need at least 2 points");

  PcaProjection p;
  p.mean = latents.rowwise().mean();
  const MatrixXd centered = latents.colwise() - p.mean;
  const Eigen::Matrix<double, 7, 7> cov =
      (centered * centered.transpose()) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> solver(cov);
  // eigenvalues ascending; take the top two, sign-canonicalised
  for (int c = 0; c < 2; ++c) {
    Vector7d v = solver.eigenvectors().col(6 - c);
    int arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v[arg_max] < 0.0) v = -v;
    p.components.col(c) = v;
    p.variances[c] = solver.eigenvalues()[6 - c];
  }

  p.projected_training = p.components.transpose() * centered;
  for (const auto& traj : trajectories) {
    MatrixXd m(2, static_cast<Eigen::Index>(traj.size()));
    for (std::size_t t = 0; t < traj.size(); ++t)
      m.col(static_cast<Eigen::Index>(t)) = p.components.transpose() * (traj[t] - p.mean);
    p.projected_trajectories.push_back(std::move(m));
  }
  return p;
}

PcaProjection pca_projection(const VaeModel& vae, const MatrixXd& training_states,
                             const std::vector<std::vector<LatentVector>>& trajectories) {
  if (training_states.rows() != kStateDim)
    throw std::invalid_argument("pca_projection: states must be 10 x n");
  return pca_of_latents(vae.encode_mu_batch(training_states), trajectories);
}

void write_pca_csv(const PcaProjection& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pca csv: " + path);
  out << "set,index,pc1,pc2\n";
  for (Eigen::Index i = 0; i < p.projected_training.cols(); ++i)
    out << "training," << i << "," << format_double(p.projected_training(0, i)) << ","
        << format_double(p.projected_training(1, i)) << "\n";
  for (std::size_t t = 0; t < p.projected_trajectories.size(); ++t) {
    const auto& m = p.projected_trajectories[t];
    for (Eigen::Index i = 0; i < m.cols(); ++i)
      out << "trajectory" << t << "," << i << "," << format_double(m(0, i)) << ","
          << format_double(m(1, i)) << "\n";
  }
}

EvalReport run_benchmark(const std::string& planner_name, const PlanFn& planner,
                         const std::vector<Scenario>& scenarios, int k_obstacles,
                         const RobotModel& robot, const BenchmarkConfig& cfg) {
  EvalReport report;
  const int n = static_cast<int>(scenarios.size());
  report.rows.resize(n);

  const auto run_one = [&](int i) {
    const Scenario& sc = scenarios[i];
    const PlanResult plan = planner(sc, sc.seed);
    const SuccessJudgement j =
        judge_success(plan, sc, robot, cfg.success_threshold, cfg.collision_resolution);
    const NormalizedPathLength len = normalized_path_length(plan, sc, robot);
    ScenarioRow row;
    row.index = i;
    row.planner = planner_name;
    row.seed = sc.seed;
    row.k_obstacles = k_obstacles;
    row.success = j.success;
    row.final_distance = j.final_distance;
    row.collided = j.collided;
    row.steps = plan.step_count;
    row.wall_seconds = plan.planning_seconds;
    row.normalized_path_length = len.value;
    row.degenerate_length = len.degenerate;
    double min_dist = std::numeric_limits<double>::infinity();
    for (const auto& step : plan.steps)
      min_dist = std::min(min_dist, (step.e - sc.target_e).norm());
    row.min_decoded_distance = min_dist;
    const PlanStep& last = plan.steps.back();
    row.final_delta = (last.e - forward_kinematics(last.q, robot.dh)).norm();
    row.status = to_string(plan.status);
    report.rows[i] = std::move(row);
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || n < 2) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (int t = 0; t < jobs; ++t)
      threads.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    for (auto& th : threads) th.join();
  }

  report.aggregates = compute_aggregates(report.rows);
  return report;
}

EvalReport merge_reports(const std::vector<EvalReport>& reports) {
  EvalReport merged;
  for (const auto& r : reports)
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  merged.aggregates = compute_aggregates(merged.rows);
  return merged;
}

std::vector<Aggregate> compute_aggregates(const std::vector<ScenarioRow>& rows) {
  std::map<std::pair<std::string, int>, std::vector<const ScenarioRow*>> groups;
  for (const auto& row : rows) groups[{row.planner, row.k_obstacles}].push_back(&row);

  std::vector<Aggregate> out;
  for (const auto& [key, group] : groups) {
    Aggregate a;
    a.planner = key.first;
    a.k_obstacles = key.second;
    a.n = static_cast<int>(group.size());
    std::vector<double> lengths, seconds;
    for (const auto* row : group) {
      if (row->success) {
        ++a.successes;
        if (!row->degenerate_length) lengths.push_back(row->normalized_path_length);
      }
      seconds.push_back(row->wall_seconds);
    }
    a.success_interval = wilson_interval(a.successes, a.n);
    const auto mean_std = [](const std::vector<double>& v, double& mean, double& stdev) {
      mean = 0.0;
      stdev = 0.0;
      if (v.empty()) return;
      for (double x : v) mean += x;
      mean /= v.size();
      for (double x : v) stdev += (x - mean) * (x - mean);
      stdev = v.size() > 1 ? std::sqrt(stdev / (v.size() - 1)) : 0.0;
    };
    mean_std(lengths, a.mean_path_length, a.std_path_length);
    mean_std(seconds, a.mean_seconds, a.std_seconds);
    out.push_back(std::move(a));
  }
  return out;
}

void write_report_csv(const EvalReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "index,planner,seed,k_obstacles,success,final_distance,collided,steps,wall_seconds,"
         "normalized_path_length,degenerate_length,min_decoded_distance,final_delta,status\n";
  for (const auto& row : r.rows) {
    out << row.index << "," << row.planner << "," << row.seed << "," << row.k_obstacles << ","
        << (row.success ? 1 : 0) << "," << format_double(row.final_distance) << ","
        << (row.collided ? 1 : 0) << "," << row.steps << "," << format_double(row.wall_seconds)
        << "," << format_double(row.normalized_path_length) << ","
        << (row.degenerate_length ? 1 : 0) << "," << format_double(row.min_decoded_distance)
        << "," << format_double(row.final_delta) << "," << row.status << "\n";
  }
}

void write_min_distance_scatter_csv(const EvalReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scatter: " + path);
  out << "planner,k_obstacles,seed,min_decoded_distance,final_delta,success\n";
  for (const auto& row : r.rows)
    out << row.planner << "," << row.k_obstacles << "," << row.seed << ","
        << format_double(row.min_decoded_distance) << "," << format_double(row.final_delta) << ","
        << (row.success ? 1 : 0) << "\n";
}

void write_summary_json(const EvalReport& r, const std::string& resolved_config,
                        const std::vector<std::pair<std::string, std::string>>& fingerprints,
                        const std::string& path) {
  nlohmann::ordered_json j;
  j["timing_note"] =
      "wall_seconds covers the planning call only; model loading and scenario IO excluded";
  j["config_hash"] = fnv1a_hex(resolved_config);
  nlohmann::ordered_json fps;
  for (const auto& [name, fp] : fingerprints) fps[name] = fp;
  j["checkpoint_fingerprints"] = std::move(fps);
  nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
  for (const auto& a : r.aggregates) {
    aggs.push_back({{"planner", a.planner},
                    {"k_obstacles", a.k_obstacles},
                    {"n", a.n},
                    {"successes", a.successes},
                    {"success_rate", a.n > 0 ? static_cast<double>(a.successes) / a.n : 0.0},
                    {"wilson_low", a.success_interval.low},
                    {"wilson_high", a.success_interval.high},
                    {"mean_path_length", a.mean_path_length},
                    {"std_path_length", a.std_path_length},
                    {"mean_seconds", a.mean_seconds},
                    {"std_seconds", a.std_seconds}});
  }
  j["aggregates"] = std::move(aggs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary: " + path);
  out << j.dump(1, '\t') << "\n";
}

}  // namespace lspp
