#ifndef LSPP_RUN_CONFIG_HPP_
#define LSPP_RUN_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lspp/baselines.hpp"
#include "lspp/classifier.hpp"
#include "lspp/datagen.hpp"
#include "lspp/planner.hpp"
#include "lspp/vae.hpp"

namespace lspp {

/// Fully resolved hyperparameters for one run. The `paper` profile carries
/// the published values (2048-wide nets, 16k epochs, 100k samples); `desk`
/// substitutes a workstation-scale setup (256-wide nets, short schedules,
/// looser reconstruction target) and is the default everywhere.
struct RunConfig {
  std::string profile = "desk";
  std::uint64_t seed = 7;

  VaeArchitecture vae_arch;
  VaeTrainConfig vae_train;
  ClassifierTrainConfig classifier_train;
  PlannerConfig planner;
  DatagenConfig datagen;
  PotentialFieldConfig potential_field;
  RrtConnectConfig rrt;

  int states_n = 20000;
  int collision_n = 40000;
  double success_threshold = 0.01;     // metres, evaluation success distance
  double collision_resolution = 0.02;  // rad, path collision checks
  double control_frequency_hz = 50.0;
};

/// profile = "paper" | "desk".
RunConfig make_profile(const std::string& profile);

/// Applies `key value` lines from a config file ('#' comments). Unknown keys
/// are an error. CLI flags are applied after this, so flags win.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every key with its current value, one per line; written into output
/// directories so a run can be reproduced bit-for-bit.
std::string resolved_config_text(const RunConfig& cfg);

}  // namespace lspp

#endif  // LSPP_RUN_CONFIG_HPP_
