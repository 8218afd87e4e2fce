// lspp: data generation, training, planning, benchmarking and analysis for
// latent-space path planning on a 7-DoF arm.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lspp/baselines.hpp"
#include "lspp/classifier.hpp"
#include "lspp/datagen.hpp"
#include "lspp/eval.hpp"
#include "lspp/io_util.hpp"
#include "lspp/planner.hpp"
#include "lspp/robot_config.hpp"
#include "lspp/run_config.hpp"
#include "lspp/vae.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// exit codes: 0 ok, 2 usage, 3 missing file, 4 malformed input,
// 5 contract violation, 6 budget/training abort
struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

int classify_exception(const std::exception& e) {
  if (const auto* ce = dynamic_cast<const CliError*>(&e)) return ce->code;
  const std::string msg = e.what();
  if (msg.find("cannot open") != std::string::npos ||
      msg.find("cannot write") != std::string::npos)
    return 3;
  if (msg.find("budget") != std::string::npos || msg.find("non-finite") != std::string::npos)
    return 6;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 5;
  return 4;
}

/// Options shared by every subcommand.
struct CommonOpts {
  std::string profile = "desk";
  std::uint64_t seed = 7;
  std::string config_file;
  std::vector<std::string> overrides;  // key=value
  std::string robot_config;
  std::string out;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--profile", o.profile, "hyperparameter profile: paper|desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--config", o.config_file, "key-value config file (flags win)");
  cmd->add_option("--set", o.overrides, "config override key=value (repeatable)");
  cmd->add_option("--robot-config", o.robot_config, "robot constants file");
  cmd->add_option("--out", o.out, "output directory (default $LSPP_OUT_DIR or ./out)");
  cmd->add_option("--jobs", o.jobs, "worker threads for generation/benchmarks");
}

lspp::RunConfig resolve_config(const CommonOpts& o) {
  lspp::RunConfig cfg = lspp::make_profile(o.profile);
  cfg.seed = o.seed;
  if (!o.config_file.empty()) lspp::apply_config_file(cfg, o.config_file);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CliError(2, "--set expects key=value, got '" + kv + "'");
    lspp::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.seed = o.seed;  // the flag wins over config files
  return cfg;
}

lspp::RobotModel resolve_robot(const CommonOpts& o) {
  return o.robot_config.empty() ? lspp::panda_model() : lspp::load_robot_config(o.robot_config);
}

fs::path resolve_out_dir(const CommonOpts& o, const char* subdir) {
  fs::path root;
  if (!o.out.empty()) {
    root = o.out;
  } else if (const char* env = std::getenv("LSPP_OUT_DIR")) {
    root = fs::path(env) / subdir;
  } else {
    root = fs::path("out") / subdir;
  }
  fs::create_directories(root);
  return root;
}

/// Every run leaves enough in its output directory to be reproduced.
void echo_run_inputs(const fs::path& dir, const lspp::RunConfig& cfg,
                     const lspp::RobotModel& robot) {
  std::ofstream cfg_out(dir / "resolved_config.txt", std::ios::binary);
  cfg_out << lspp::resolved_config_text(cfg);
  std::ofstream robot_out(dir / "robot_config.txt", std::ios::binary);
  lspp::save_robot_config(robot, robot_out);
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(3, "cannot open file: " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return lspp::fnv1a_hex(bytes);
}

lspp::PlannerConfig apply_ablations(lspp::PlannerConfig pc,
                                    const std::vector<std::string>& ablate) {
  for (const auto& a : ablate) {
    if (a == "prior")
      pc.enable_prior_loss = false;
    else if (a == "obstacle")
      pc.enable_obstacle_loss = false;
    else
      throw CliError(2, "--ablate expects prior or obstacle, got '" + a + "'");
  }
  return pc;
}

// ---- subcommand bodies ----

int cmd_gen_data(const CommonOpts& o, const std::string& kind, int n) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "data");
  echo_run_inputs(dir, cfg, robot);
  const int count = n > 0 ? n : (kind == "states" ? cfg.states_n : cfg.collision_n);

  if (kind == "states") {
    const auto samples = lspp::generate_state_dataset(count, cfg.seed, robot, cfg.datagen, o.jobs);
    lspp::write_state_csv(samples, (dir / "states.csv").string());
    std::printf("wrote %zu states to %s\n", samples.size(), (dir / "states.csv").c_str());
  } else if (kind == "collision") {
    const auto samples =
        lspp::generate_collision_dataset(count, cfg.seed, robot, cfg.datagen, o.jobs);
    lspp::write_collision_csv(samples, (dir / "collision.csv").string());
    std::printf("wrote %zu labelled pairs to %s\n", samples.size(),
                (dir / "collision.csv").c_str());
  } else {
    throw CliError(2, "--kind expects states or collision");
  }
  return 0;
}

int cmd_gen_scenarios(const CommonOpts& o, const std::vector<int>& ks, int n) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "scenarios");
  echo_run_inputs(dir, cfg, robot);

  lspp::ScenarioManifest manifest;
  for (int k : ks) {
    const std::uint64_t k_seed = lspp::derive_stream_seed(cfg.seed, 0xabcd + k);
    const auto suite = lspp::generate_scenarios(k, n, k_seed, robot, cfg.datagen, o.jobs);
    for (const auto& sc : suite) manifest.seeds_per_k[k].push_back(sc.seed);
    std::printf("generated %zu scenarios with %d obstacle(s)\n", suite.size(), k);
  }
  lspp::save_manifest(manifest, (dir / "manifest.json").string());
  std::printf("manifest: %s\n", (dir / "manifest.json").c_str());
  return 0;
}

int cmd_train_vae(const CommonOpts& o, const std::string& data_path) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "vae");
  echo_run_inputs(dir, cfg, robot);

  const auto samples = lspp::read_state_csv(data_path);
  const lspp::MatrixXd states = lspp::states_to_matrix(samples);
  std::printf("training vae: %d epochs on %zu states (%dx%d hidden)\n", cfg.vae_train.epochs,
              samples.size(), cfg.vae_arch.hidden_layers, cfg.vae_arch.hidden_units);

  std::ofstream metrics(dir / "train_metrics.csv", std::ios::binary);
  metrics << "epoch,loss,kl,reconstruction,lambda,c_ma\n";
  lspp::VaeTrainConfig tc = cfg.vae_train;
  tc.seed = cfg.seed;
  lspp::VaeTrainResult result;
  const lspp::VaeModel model =
      lspp::train_vae(states, cfg.vae_arch, tc, &result, [&](const lspp::VaeEpochMetrics& em) {
        metrics << em.epoch << "," << lspp::format_double(em.loss) << ","
                << lspp::format_double(em.kl) << "," << lspp::format_double(em.reconstruction)
                << "," << lspp::format_double(em.lambda) << "," << lspp::format_double(em.c_ma)
                << "\n";
        if (em.epoch % 50 == 0)
          std::printf("epoch %d: loss %.5f kl %.4f recon %.5f lambda %.3g\n", em.epoch, em.loss,
                      em.kl, em.reconstruction, em.lambda);
      });

  lspp::save_vae(model, tc, result.final_geco, (dir / "vae.json").string());
  std::printf("checkpoint: %s\n", (dir / "vae.json").c_str());
  return 0;
}

int cmd_train_classifier(const CommonOpts& o, const std::string& data_path,
                         const std::string& vae_path) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "classifier");
  echo_run_inputs(dir, cfg, robot);

  const lspp::VaeModel vae = lspp::load_vae(vae_path);
  const auto dataset = lspp::read_collision_csv(data_path);
  const int mismatches = lspp::validate_collision_labels(dataset, robot);
  if (mismatches > 0)
    throw CliError(4, "collision dataset fails label integrity: " + std::to_string(mismatches) +
                          " mismatches against the geometric oracle");
  const auto [train, validation] = lspp::split_train_validation(dataset);

  int positives = 0;
  for (const auto& s : train) positives += s.label;
  if (positives * 2 != static_cast<int>(train.size()))
    std::fprintf(stderr, "warning: training labels unbalanced (%d/%zu positives)\n", positives,
                 train.size());

  lspp::ClassifierTrainConfig tc = cfg.classifier_train;
  tc.seed = cfg.seed;
  std::printf("training classifier: %d epochs on %zu pairs\n", tc.epochs, train.size());
  std::ofstream metrics(dir / "train_metrics.csv", std::ios::binary);
  metrics << "epoch,loss\n";
  const lspp::CollisionClassifier clf = lspp::train_classifier(
      vae, train, tc, nullptr, [&](const lspp::ClassifierEpochMetrics& em) {
        metrics << em.epoch << "," << lspp::format_double(em.loss) << "\n";
        if (em.epoch % 25 == 0) std::printf("epoch %d: bce %.5f\n", em.epoch, em.loss);
      });

  const auto report = lspp::evaluate_classifier(clf, vae, validation);
  lspp::write_classifier_report_csv(report, (dir / "classifier_report.csv").string());
  std::printf("held-out balanced accuracy: %.4f (n=%d)\n", report.balanced_accuracy, report.n);

  lspp::save_classifier(clf, tc, file_fingerprint(vae_path), (dir / "classifier.json").string());
  std::printf("checkpoint: %s\n", (dir / "classifier.json").c_str());
  return 0;
}

int cmd_plan(const CommonOpts& o, const std::string& vae_path, const std::string& clf_path,
             const std::string& scenario_path, const std::string& planner_name,
             const std::vector<std::string>& ablate) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "plan");
  echo_run_inputs(dir, cfg, robot);

  const lspp::Scenario sc = lspp::load_scenario(scenario_path);
  lspp::PlanResult result;
  if (planner_name == "lspp") {
    const lspp::VaeModel vae = lspp::load_vae(vae_path);
    std::optional<lspp::CollisionClassifier> clf;
    if (!clf_path.empty()) clf = lspp::load_classifier(clf_path);
    lspp::PlannerConfig pc = apply_ablations(cfg.planner, ablate);
    if (!clf && !sc.obstacles.empty() && pc.enable_obstacle_loss)
      throw CliError(2, "scenario has obstacles: give --classifier or --ablate obstacle");
    result = lspp::plan(vae, clf ? &*clf : nullptr, sc, robot, pc, cfg.seed);
  } else if (planner_name == "pf") {
    result = lspp::plan_potential_field(sc, robot, cfg.potential_field);
  } else if (planner_name == "rrtc") {
    result = lspp::plan_rrt_connect(sc, robot, cfg.rrt, cfg.seed);
  } else {
    throw CliError(2, "--planner expects lspp, pf or rrtc");
  }

  lspp::write_plan_trace_csv(result, (dir / "trace.csv").string());
  const lspp::SuccessJudgement judge =
      lspp::judge_success(result, sc, robot, cfg.success_threshold, cfg.collision_resolution);
  ordered_json summary;
  summary["planner"] = planner_name;
  summary["status"] = lspp::to_string(result.status);
  summary["steps"] = result.step_count;
  summary["final_fk_distance"] = judge.final_distance;
  summary["collided"] = judge.collided;
  summary["success"] = judge.success;
  summary["planning_seconds"] = result.planning_seconds;
  std::ofstream(dir / "plan_summary.json") << summary.dump(1, '\t') << "\n";
  std::printf("%s: status=%s steps=%d final=%.4fm collided=%d success=%d\n", planner_name.c_str(),
              lspp::to_string(result.status).c_str(), result.step_count, judge.final_distance,
              judge.collided ? 1 : 0, judge.success ? 1 : 0);
  return 0;
}

int cmd_bench(const CommonOpts& o, const std::string& planner_name, const std::string& vae_path,
              const std::string& clf_path, const std::string& manifest_path,
              std::vector<int> ks, const std::vector<std::string>& ablate,
              bool filter_am_relevant_flag, int limit, bool save_traces) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "bench");
  echo_run_inputs(dir, cfg, robot);

  const lspp::ScenarioManifest manifest = lspp::load_manifest(manifest_path);
  if (ks.empty())
    for (const auto& [k, seeds] : manifest.seeds_per_k) ks.push_back(k);

  std::optional<lspp::VaeModel> vae;
  std::optional<lspp::CollisionClassifier> clf;
  std::vector<std::pair<std::string, std::string>> fingerprints;
  if (planner_name == "lspp" || filter_am_relevant_flag) {
    if (vae_path.empty()) throw CliError(2, "planner lspp needs --vae");
    vae = lspp::load_vae(vae_path);
    fingerprints.emplace_back("vae", file_fingerprint(vae_path));
  }
  if (planner_name == "lspp" && !clf_path.empty()) {
    clf = lspp::load_classifier(clf_path);
    fingerprints.emplace_back("classifier", file_fingerprint(clf_path));
  }

  const lspp::PlannerConfig pc = apply_ablations(cfg.planner, ablate);

  std::vector<lspp::EvalReport> reports;
  for (int k : ks) {
    const auto it = manifest.seeds_per_k.find(k);
    if (it == manifest.seeds_per_k.end())
      throw CliError(4, "manifest has no scenarios for k=" + std::to_string(k));
    std::vector<lspp::Scenario> suite;
    for (std::uint64_t seed : it->second)
      suite.push_back(lspp::generate_scenario(k, seed, robot, cfg.datagen));

    if (filter_am_relevant_flag && k > 0) {
      lspp::PlannerConfig no_obs = cfg.planner;
      no_obs.enable_obstacle_loss = false;
      const lspp::PlannedPathFn path_fn = [&](const lspp::Scenario& s) {
        return lspp::plan(*vae, nullptr, s, robot, no_obs, cfg.seed).joint_path();
      };
      suite = lspp::filter_am_relevant(suite, path_fn, robot, cfg.collision_resolution);
      std::printf("k=%d: %zu AM-relevant scenarios\n", k, suite.size());
    }
    if (limit > 0 && static_cast<int>(suite.size()) > limit) suite.resize(limit);

    lspp::PlanFn plan_fn;
    if (planner_name == "lspp") {
      if (!clf && pc.enable_obstacle_loss && k > 0)
        throw CliError(2, "bench lspp with obstacles needs --classifier (or --ablate obstacle)");
      plan_fn = [&](const lspp::Scenario& s, std::uint64_t seed) {
        return lspp::plan(*vae, clf ? &*clf : nullptr, s, robot, pc, seed);
      };
    } else if (planner_name == "pf") {
      plan_fn = [&](const lspp::Scenario& s, std::uint64_t) {
        return lspp::plan_potential_field(s, robot, cfg.potential_field);
      };
    } else if (planner_name == "rrtc") {
      plan_fn = [&](const lspp::Scenario& s, std::uint64_t seed) {
        return lspp::plan_rrt_connect(s, robot, cfg.rrt, seed);
      };
    } else {
      throw CliError(2, "--planner expects lspp, pf or rrtc");
    }

    lspp::BenchmarkConfig bc;
    bc.success_threshold = cfg.success_threshold;
    bc.collision_resolution = cfg.collision_resolution;
    bc.jobs = o.jobs;
    lspp::EvalReport rep = lspp::run_benchmark(planner_name, plan_fn, suite, k, robot, bc);

    if (save_traces) {
      const fs::path tdir = dir / ("traces_k" + std::to_string(k));
      fs::create_directories(tdir);
      for (std::size_t i = 0; i < suite.size(); ++i) {
        const lspp::PlanResult r = plan_fn(suite[i], suite[i].seed);
        lspp::write_plan_trace_csv(r, (tdir / ("trace_" + std::to_string(i) + ".csv")).string());
      }
    }
    reports.push_back(std::move(rep));
  }

  const lspp::EvalReport merged = lspp::merge_reports(reports);
  lspp::write_report_csv(merged, (dir / "report.csv").string());
  lspp::write_min_distance_scatter_csv(merged, (dir / "min_dist_vs_delta.csv").string());
  lspp::write_summary_json(merged, lspp::resolved_config_text(cfg), fingerprints,
                           (dir / "summary.json").string());
  for (const auto& a : merged.aggregates)
    std::printf("%s k=%d: %d/%d success (%.1f%% [%.1f, %.1f]) len %.2f time %.0fms\n",
                a.planner.c_str(), a.k_obstacles, a.successes, a.n,
                100.0 * a.successes / std::max(1, a.n), 100.0 * a.success_interval.low,
                100.0 * a.success_interval.high, a.mean_path_length, 1000.0 * a.mean_seconds);
  std::printf("report: %s\n", (dir / "report.csv").c_str());
  return 0;
}

int cmd_analyze(const CommonOpts& o, const std::string& mode, const std::string& vae_path,
                const std::string& data_path, const std::vector<std::string>& traces, int n,
                double frequency) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "analysis");
  echo_run_inputs(dir, cfg, robot);

  if (mode == "sample-consistency") {
    const lspp::VaeModel vae = lspp::load_vae(vae_path);
    const auto samples = vae.sample_prior(n, cfg.seed);
    const auto summary = lspp::sample_consistency(vae, samples, robot);
    lspp::write_delta_histogram_csv(summary, 50, (dir / "hist_delta.csv").string());
    ordered_json j;
    j["n"] = n;
    j["median_delta_m"] = summary.median;
    j["p95_delta_m"] = summary.p95;
    j["mean_delta_m"] = summary.mean;
    std::ofstream(dir / "sample_consistency.json") << j.dump(1, '\t') << "\n";
    std::printf("sample consistency over %d prior samples: median %.4fm p95 %.4fm\n", n,
                summary.median, summary.p95);
    return 0;
  }
  if (mode == "pca") {
    const lspp::VaeModel vae = lspp::load_vae(vae_path);
    const auto samples = lspp::read_state_csv(data_path);
    std::vector<std::vector<lspp::LatentVector>> trajectories;
    for (const auto& trace : traces) {
      // re-encode the decoded joint path of a trace via its (q, e) columns
      std::ifstream in(trace);
      if (!in) throw CliError(3, "cannot open trace: " + trace);
      std::string line;
      std::getline(in, line);  // header
      std::vector<lspp::LatentVector> traj;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(is, field, ',')) vals.push_back(std::stod(field));
        lspp::RobotState x;
        for (int i = 0; i < 7; ++i) x.q[i] = vals[1 + i];
        for (int i = 0; i < 3; ++i) x.e[i] = vals[8 + i];
        traj.push_back(vae.encode(x).mu);
      }
      trajectories.push_back(std::move(traj));
    }
    const auto p = lspp::pca_projection(vae, lspp::states_to_matrix(samples), trajectories);
    lspp::write_pca_csv(p, (dir / "pca.csv").string());
    std::printf("pca: top-2 variances %.4f %.4f -> %s\n", p.variances[0], p.variances[1],
                (dir / "pca.csv").c_str());
    return 0;
  }
  if (mode == "dyn-feas") {
    std::vector<lspp::DynamicFeasibilityReport> reports;
    for (const auto& trace : traces) {
      std::ifstream in(trace);
      if (!in) throw CliError(3, "cannot open trace: " + trace);
      std::string line;
      std::getline(in, line);
      lspp::PlanResult r;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(is, field, ',')) vals.push_back(std::stod(field));
        lspp::PlanStep s;
        for (int i = 0; i < 7; ++i) s.q[i] = vals[1 + i];
        r.steps.push_back(s);
      }
      reports.push_back(lspp::dynamic_feasibility(r, robot.limits, frequency));
    }
    lspp::write_dynamic_feasibility_csv(reports, (dir / "dyn_feas.csv").string());
    int violations = 0;
    for (const auto& r : reports) violations += r.any_violation() ? 1 : 0;
    std::printf("dynamic feasibility at %.0f Hz: %d/%zu plans violate limits -> %s\n", frequency,
                violations, reports.size(), (dir / "dyn_feas.csv").c_str());
    return 0;
  }
  throw CliError(2, "analyze expects sample-consistency, pca or dyn-feas");
}

int cmd_pf_sweep(const CommonOpts& o, const std::string& manifest_path, int limit) {
  const lspp::RunConfig cfg = resolve_config(o);
  const lspp::RobotModel robot = resolve_robot(o);
  const fs::path dir = resolve_out_dir(o, "pf_sweep");
  echo_run_inputs(dir, cfg, robot);

  const lspp::ScenarioManifest manifest = lspp::load_manifest(manifest_path);
  std::vector<lspp::Scenario> suite;
  for (const auto& [k, seeds] : manifest.seeds_per_k)
    for (std::uint64_t seed : seeds) {
      suite.push_back(lspp::generate_scenario(k, seed, robot, cfg.datagen));
      if (limit > 0 && static_cast<int>(suite.size()) >= limit) break;
    }

  std::ofstream out(dir / "sweep.csv", std::ios::binary);
  out << "step_size,attractive_gain,v_max,rho,alpha_rep,successes,n\n";
  double best_rate = -1.0;
  lspp::PotentialFieldConfig best;
  for (double step : {0.01, 0.02, 0.05}) {
    for (double gain : {0.5, 1.0, 2.0}) {
      for (double vmax : {0.5, 1.5, 3.0}) {
        for (double rho : {0.15, 0.3, 0.5}) {
          for (double shape : {3.0, 6.0}) {
            lspp::PotentialFieldConfig pf = cfg.potential_field;
            pf.step_size = step;
            pf.attractive_gain = gain;
            pf.repulsive_v_max = vmax;
            pf.influence_radius = rho;
            pf.repulsive_shape = shape;
            int success = 0;
            for (const auto& sc : suite) {
              const lspp::PlanResult r = lspp::plan_potential_field(sc, robot, pf);
              if (lspp::judge_success(r, sc, robot, cfg.success_threshold).success) ++success;
            }
            out << step << "," << gain << "," << vmax << "," << rho << "," << shape << ","
                << success << "," << suite.size() << "\n";
            const double rate = static_cast<double>(success) / std::max<std::size_t>(1, suite.size());
            if (rate > best_rate) {
              best_rate = rate;
              best = pf;
            }
          }
        }
      }
    }
  }
  std::printf("best pf config: step %.3g gain %.3g v_max %.3g rho %.3g alpha %.3g (%.1f%%)\n",
              best.step_size, best.attractive_gain, best.repulsive_v_max, best.influence_radius,
              best.repulsive_shape, 100.0 * best_rate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-space path planning pipeline"};
  app.require_subcommand(1);

  CommonOpts gen_data_opts, gen_scn_opts, train_vae_opts, train_clf_opts, plan_opts, bench_opts,
      analyze_opts, sweep_opts;

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "generate training datasets");
  std::string gd_kind = "states";
  int gd_n = 0;
  gen_data->add_option("--kind", gd_kind, "states|collision");
  gen_data->add_option("--n", gd_n, "sample count (default from profile)");
  add_common(gen_data, gen_data_opts);

  // gen-scenarios
  auto* gen_scn = app.add_subcommand("gen-scenarios", "generate evaluation scenarios");
  std::vector<int> gs_ks{1};
  int gs_n = 100;
  gen_scn->add_option("--obstacles", gs_ks, "obstacle counts (repeatable)");
  gen_scn->add_option("--n", gs_n, "scenarios per obstacle count");
  add_common(gen_scn, gen_scn_opts);

  // train-vae
  auto* train_vae_cmd = app.add_subcommand("train-vae", "train the generative model");
  std::string tv_data;
  train_vae_cmd->add_option("--data", tv_data, "states.csv")->required();
  add_common(train_vae_cmd, train_vae_opts);

  // train-classifier
  auto* train_clf = app.add_subcommand("train-classifier", "train the collision classifier");
  std::string tc_data, tc_vae;
  train_clf->add_option("--data", tc_data, "collision.csv")->required();
  train_clf->add_option("--vae", tc_vae, "frozen vae checkpoint")->required();
  add_common(train_clf, train_clf_opts);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "plan a single scenario");
  std::string p_vae, p_clf, p_scenario, p_planner = "lspp";
  std::vector<std::string> p_ablate;
  plan_cmd->add_option("--vae", p_vae, "vae checkpoint");
  plan_cmd->add_option("--classifier", p_clf, "classifier checkpoint");
  plan_cmd->add_option("--scenario", p_scenario, "scenario json")->required();
  plan_cmd->add_option("--planner", p_planner, "lspp|pf|rrtc");
  plan_cmd->add_option("--ablate", p_ablate, "drop a loss term: prior|obstacle");
  add_common(plan_cmd, plan_opts);

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark planners over a scenario manifest");
  std::string b_planner = "lspp", b_vae, b_clf, b_manifest;
  std::vector<int> b_ks;
  std::vector<std::string> b_ablate;
  bool b_filter = false, b_traces = false;
  int b_limit = 0;
  bench->add_option("--planner", b_planner, "lspp|pf|rrtc");
  bench->add_option("--vae", b_vae, "vae checkpoint");
  bench->add_option("--classifier", b_clf, "classifier checkpoint");
  bench->add_option("--manifest", b_manifest, "scenario manifest")->required();
  bench->add_option("--obstacles", b_ks, "restrict to these obstacle counts");
  bench->add_option("--ablate", b_ablate, "drop a loss term: prior|obstacle");
  bench->add_flag("--filter-am-relevant", b_filter,
                  "keep only scenarios the obstacle-loss-free planner fails");
  bench->add_option("--limit", b_limit, "cap scenarios per obstacle count");
  bench->add_flag("--save-traces", b_traces, "write per-scenario trace CSVs");
  add_common(bench, bench_opts);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "model and plan analyses");
  std::string a_mode, a_vae, a_data;
  std::vector<std::string> a_traces;
  int a_n = 10000;
  double a_freq = 50.0;
  analyze->add_option("mode", a_mode, "sample-consistency|pca|dyn-feas")->required();
  analyze->add_option("--vae", a_vae, "vae checkpoint");
  analyze->add_option("--data", a_data, "states.csv (pca)");
  analyze->add_option("--trace", a_traces, "plan trace csv (repeatable)");
  analyze->add_option("--n", a_n, "prior sample count");
  analyze->add_option("--frequency", a_freq, "control frequency Hz");
  add_common(analyze, analyze_opts);

  // pf-sweep
  auto* sweep = app.add_subcommand("pf-sweep", "grid-search potential field hyperparameters");
  std::string s_manifest;
  int s_limit = 30;
  sweep->add_option("--manifest", s_manifest, "scenario manifest")->required();
  sweep->add_option("--limit", s_limit, "max scenarios in the sweep");
  add_common(sweep, sweep_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_data->parsed()) return cmd_gen_data(gen_data_opts, gd_kind, gd_n);
    if (gen_scn->parsed()) return cmd_gen_scenarios(gen_scn_opts, gs_ks, gs_n);
    if (train_vae_cmd->parsed()) return cmd_train_vae(train_vae_opts, tv_data);
    if (train_clf->parsed()) return cmd_train_classifier(train_clf_opts, tc_data, tc_vae);
    if (plan_cmd->parsed())
      return cmd_plan(plan_opts, p_vae, p_clf, p_scenario, p_planner, p_ablate);
    if (bench->parsed())
      return cmd_bench(bench_opts, b_planner, b_vae, b_clf, b_manifest, b_ks, b_ablate, b_filter,
                       b_limit, b_traces);
    if (analyze->parsed())
      return cmd_analyze(analyze_opts, a_mode, a_vae, a_data, a_traces, a_n, a_freq);
    if (sweep->parsed()) return cmd_pf_sweep(sweep_opts, s_manifest, s_limit);
  } catch (const std::exception& e) {
    const int code = classify_exception(e);
    ordered_json err;
    err["code"] = code;
    err["message"] = e.what();
    std::cerr << "error: " << err.dump() << "\n";
    return code;
  }
  return 2;
}
