#include "lspp/run_config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "lspp/io_util.hpp"

namespace lspp {

RunConfig make_profile(const std::string& profile) {
  RunConfig cfg;
  cfg.profile = profile;
  if (profile == "paper") {
    cfg.vae_arch = {4, 2048};
    cfg.vae_train.epochs = 16000;
    cfg.vae_train.batch_size = 256;
    cfg.vae_train.learning_rate = 1e-4;
    cfg.vae_train.tau = 0.0008;
    cfg.vae_train.geco_learning_rate = 0.005;
    cfg.vae_train.geco_alpha_ma = 0.95;
    cfg.classifier_train.hidden_layers = 4;
    cfg.classifier_train.hidden_units = 2048;
    cfg.classifier_train.epochs = 16000;
    cfg.classifier_train.learning_rate = 1e-4;
    cfg.states_n = 100000;
    cfg.collision_n = 100000;
  } else if (profile == "desk") {
    // calibrated so the GECO constraint is attainable and the multiplier
    // unwinds within the schedule; see README "Profiles"
    cfg.vae_arch = {4, 256};
    cfg.vae_train.epochs = 1900;
    cfg.vae_train.batch_size = 128;
    cfg.vae_train.learning_rate = 1e-3;
    cfg.vae_train.learning_rate_final = 1e-4;
    cfg.vae_train.tau = 0.07;
    cfg.vae_train.geco_learning_rate = 0.005;
    cfg.vae_train.geco_alpha_ma = 0.95;
    cfg.classifier_train.hidden_layers = 4;
    cfg.classifier_train.hidden_units = 256;
    cfg.classifier_train.epochs = 300;
    cfg.classifier_train.learning_rate = 1e-3;
    cfg.states_n = 20000;
    cfg.collision_n = 40000;
  } else {
    throw std::invalid_argument("unknown profile '" + profile + "' (expected paper or desk)");
  }
  // planning hyperparameters are profile-independent (published table)
  return cfg;
}

namespace {

struct Entry {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

double to_double(const std::string& v, const std::string& key) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value '" + v + "' for " + key);
  }
}

int to_int(const std::string& v, const std::string& key) {
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer value '" + v + "' for " + key);
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw std::runtime_error("config: bad boolean value '" + v + "' for " + key);
}

using Registry = std::vector<std::pair<std::string, Entry>>;

#define LSPP_DOUBLE_KEY(name, field)                                                   \
  {name,                                                                               \
   {[](const RunConfig& c) { return format_double(c.field); },                         \
    [](RunConfig& c, const std::string& v) { c.field = to_double(v, name); }}}
#define LSPP_INT_KEY(name, field)                                                      \
  {name,                                                                               \
   {[](const RunConfig& c) { return std::to_string(c.field); },                        \
    [](RunConfig& c, const std::string& v) { c.field = to_int(v, name); }}}
#define LSPP_BOOL_KEY(name, field)                                                     \
  {name,                                                                               \
   {[](const RunConfig& c) { return c.field ? std::string("true") : std::string("false"); }, \
    [](RunConfig& c, const std::string& v) { c.field = to_bool(v, name); }}}

const Registry& registry() {
  static const Registry reg = {
      {"profile",
       {[](const RunConfig& c) { return c.profile; },
        [](RunConfig& c, const std::string& v) { c.profile = v; }}},
      {"seed",
       {[](const RunConfig& c) { return std::to_string(c.seed); },
        [](RunConfig& c, const std::string& v) { c.seed = std::stoull(v); }}},
      LSPP_INT_KEY("vae.hidden_layers", vae_arch.hidden_layers),
      LSPP_INT_KEY("vae.hidden_units", vae_arch.hidden_units),
      LSPP_INT_KEY("vae.epochs", vae_train.epochs),
      LSPP_INT_KEY("vae.batch_size", vae_train.batch_size),
      LSPP_DOUBLE_KEY("vae.learning_rate", vae_train.learning_rate),
      LSPP_DOUBLE_KEY("vae.learning_rate_final", vae_train.learning_rate_final),
      LSPP_DOUBLE_KEY("vae.tau", vae_train.tau),
      LSPP_DOUBLE_KEY("vae.geco_learning_rate", vae_train.geco_learning_rate),
      LSPP_DOUBLE_KEY("vae.geco_alpha_ma", vae_train.geco_alpha_ma),
      LSPP_DOUBLE_KEY("vae.lambda_init", vae_train.lambda_init),
      LSPP_INT_KEY("classifier.hidden_layers", classifier_train.hidden_layers),
      LSPP_INT_KEY("classifier.hidden_units", classifier_train.hidden_units),
      LSPP_INT_KEY("classifier.epochs", classifier_train.epochs),
      LSPP_INT_KEY("classifier.batch_size", classifier_train.batch_size),
      LSPP_DOUBLE_KEY("classifier.learning_rate", classifier_train.learning_rate),
      LSPP_BOOL_KEY("classifier.use_posterior_sample", classifier_train.use_posterior_sample),
      LSPP_DOUBLE_KEY("planner.learning_rate", planner.learning_rate),
      LSPP_INT_KEY("planner.max_steps", planner.max_steps),
      LSPP_DOUBLE_KEY("planner.reach_threshold", planner.reach_threshold),
      LSPP_DOUBLE_KEY("planner.geco_learning_rate", planner.geco_learning_rate),
      LSPP_DOUBLE_KEY("planner.prior_tau", planner.prior_tau),
      LSPP_DOUBLE_KEY("planner.prior_alpha_ma", planner.prior_alpha_ma),
      LSPP_DOUBLE_KEY("planner.obstacle_tau", planner.obstacle_tau),
      LSPP_DOUBLE_KEY("planner.obstacle_alpha_ma", planner.obstacle_alpha_ma),
      LSPP_DOUBLE_KEY("planner.lambda_init", planner.lambda_init),
      LSPP_BOOL_KEY("planner.enable_prior_loss", planner.enable_prior_loss),
      LSPP_BOOL_KEY("planner.enable_obstacle_loss", planner.enable_obstacle_loss),
      {"planner.optimiser",
       {[](const RunConfig& c) {
          return c.planner.optimiser == LatentOptimiser::kAdam ? std::string("adam")
                                                               : std::string("plain");
        },
        [](RunConfig& c, const std::string& v) {
          if (v == "adam")
            c.planner.optimiser = LatentOptimiser::kAdam;
          else if (v == "plain")
            c.planner.optimiser = LatentOptimiser::kPlainGradient;
          else
            throw std::runtime_error("config: planner.optimiser must be adam or plain");
        }}},
      LSPP_BOOL_KEY("planner.sample_initial_latent", planner.sample_initial_latent),
      LSPP_DOUBLE_KEY("datagen.distance_min", datagen.distance_min),
      LSPP_DOUBLE_KEY("datagen.distance_max", datagen.distance_max),
      LSPP_DOUBLE_KEY("datagen.height_min", datagen.height_min),
      LSPP_DOUBLE_KEY("datagen.height_max", datagen.height_max),
      LSPP_DOUBLE_KEY("datagen.radius_min", datagen.radius_min),
      LSPP_DOUBLE_KEY("datagen.radius_max", datagen.radius_max),
      LSPP_DOUBLE_KEY("datagen.segment_u_min", datagen.segment_u_min),
      LSPP_DOUBLE_KEY("datagen.segment_u_max", datagen.segment_u_max),
      LSPP_DOUBLE_KEY("datagen.segment_jitter", datagen.segment_jitter),
      LSPP_INT_KEY("datagen.rejection_budget", datagen.rejection_budget),
      LSPP_DOUBLE_KEY("pf.step_size", potential_field.step_size),
      LSPP_DOUBLE_KEY("pf.attractive_gain", potential_field.attractive_gain),
      LSPP_DOUBLE_KEY("pf.repulsive_v_max", potential_field.repulsive_v_max),
      LSPP_DOUBLE_KEY("pf.influence_radius", potential_field.influence_radius),
      LSPP_DOUBLE_KEY("pf.repulsive_shape", potential_field.repulsive_shape),
      LSPP_INT_KEY("pf.max_iterations", potential_field.max_iterations),
      LSPP_INT_KEY("rrt.max_samples", rrt.max_samples),
      LSPP_DOUBLE_KEY("rrt.step_size", rrt.step_size),
      LSPP_DOUBLE_KEY("rrt.edge_resolution", rrt.edge_resolution),
      LSPP_INT_KEY("data.states_n", states_n),
      LSPP_INT_KEY("data.collision_n", collision_n),
      LSPP_DOUBLE_KEY("eval.success_threshold", success_threshold),
      LSPP_DOUBLE_KEY("eval.collision_resolution", collision_resolution),
      LSPP_DOUBLE_KEY("eval.control_frequency_hz", control_frequency_hz),
  };
  return reg;
}

#undef LSPP_DOUBLE_KEY
#undef LSPP_INT_KEY
#undef LSPP_BOOL_KEY

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, entry] : registry()) {
    if (name == key) {
      entry.set(cfg, value);
      return;
    }
  }
  throw std::runtime_error("config: unknown key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::string key, value;
    if (!(is >> key)) continue;
    if (!(is >> value))
      throw std::runtime_error("config file line " + std::to_string(line_no) + ": missing value");
    apply_override(cfg, key, value);
  }
}

std::string resolved_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [name, entry] : registry()) os << name << " " << entry.get(cfg) << "\n";
  return os.str();
}

}  // namespace lspp
