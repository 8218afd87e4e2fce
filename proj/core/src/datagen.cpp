#include "lspp/datagen.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "lspp/geometry.hpp"
#include "lspp/io_util.hpp"

namespace lspp {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

/// Runs fn(i) for i in [0, n) across `jobs` threads, chunked by index.
void parallel_for_index(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n < 2 * jobs) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::atomic<int> next{0};
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    threads.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace

StateSample sample_state(Rng& stream, const RobotModel& robot, const DatagenConfig& cfg,
                         int* attempts) {
  for (int tries = 1; tries <= cfg.rejection_budget; ++tries) {
    JointConfig q;
    for (int i = 0; i < kNumJoints; ++i)
      q[i] = stream.uniform(robot.limits.lower[i], robot.limits.upper[i]);
    const CollisionReport rep = arm_in_collision(q, {}, robot.dh, robot.shape);
    if (!rep.self_collision && !rep.table) {
      if (attempts) *attempts = tries;
      return {q, forward_kinematics(q, robot.dh)};
    }
  }
  throw std::runtime_error("sample_state: rejection budget exhausted (" +
                           std::to_string(cfg.rejection_budget) + " tries)");
}

Obstacle sample_obstacle(Rng& stream, const DatagenConfig& cfg) {
  const double theta = stream.uniform(0.0, kTwoPi);
  const double dist = stream.uniform(cfg.distance_min, cfg.distance_max);
  Obstacle o;
  o.x = dist * std::cos(theta);
  o.y = dist * std::sin(theta);
  o.h = stream.uniform(cfg.height_min, cfg.height_max);
  o.r = stream.uniform(cfg.radius_min, cfg.radius_max);
  return o;
}

std::vector<StateSample> generate_state_dataset(int n, std::uint64_t seed, const RobotModel& robot,
                                                const DatagenConfig& cfg, int jobs) {
  if (n < 1) throw std::invalid_argument("generate_state_dataset: n must be >= 1");
  std::vector<StateSample> out(n);
  parallel_for_index(n, jobs, [&](int i) {
    Rng stream = stream_rng(seed, static_cast<std::uint64_t>(i));
    out[i] = sample_state(stream, robot, cfg);
  });
  return out;
}

std::vector<LabeledCollisionSample> generate_collision_dataset(int n, std::uint64_t seed,
                                                               const RobotModel& robot,
                                                               const DatagenConfig& cfg, int jobs) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("generate_collision_dataset: n must be even and >= 2");
  std::vector<LabeledCollisionSample> out(n);
  std::atomic<long> class_attempts{0};
  parallel_for_index(n, jobs, [&](int i) {
    Rng stream = stream_rng(seed, 0x51a6000000000000ULL + static_cast<std::uint64_t>(i));
    const int want = i < n / 2 ? 1 : 0;
    for (int tries = 1; tries <= cfg.rejection_budget; ++tries) {
      const StateSample s = sample_state(stream, robot, cfg);
      const Obstacle o = sample_obstacle(stream, cfg);
      const CollisionReport rep = arm_in_collision(s.q, {o}, robot.dh, robot.shape);
      const int label = rep.any_obstacle() ? 1 : 0;
      if (label == want) {
        class_attempts.fetch_add(tries);
        out[i] = {s, o, label};
        return;
      }
    }
    std::ostringstream os;
    os << "generate_collision_dataset: class budget exhausted for label " << want << " at index "
       << i << " (budget " << cfg.rejection_budget << ", mean attempts so far "
       << (i > 0 ? static_cast<double>(class_attempts.load()) / i : 0.0) << ")";
    throw std::runtime_error(os.str());
  });
  return out;
}

namespace {

Obstacle sample_segment_obstacle(Rng& stream, const DatagenConfig& cfg, const EEPosition& e0,
                                 const EEPosition& e1) {
  const double u = stream.uniform(cfg.segment_u_min, cfg.segment_u_max);
  const Vector3d p = e0 + u * (e1 - e0);
  const double phi = stream.uniform(0.0, kTwoPi);
  const double rad = stream.uniform(0.0, cfg.segment_jitter);
  Obstacle o;
  o.x = p.x() + rad * std::cos(phi);
  o.y = p.y() + rad * std::sin(phi);
  o.h = stream.uniform(cfg.height_min, cfg.height_max);
  o.r = stream.uniform(cfg.radius_min, cfg.radius_max);
  return o;
}

}  // namespace

Scenario generate_scenario(int k_obstacles, std::uint64_t seed, const RobotModel& robot,
                           const DatagenConfig& cfg) {
  if (k_obstacles < 0) throw std::invalid_argument("generate_scenario: k must be >= 0");
  Rng stream(seed);
  Scenario sc;
  sc.seed = seed;
  const StateSample start = sample_state(stream, robot, cfg);
  const StateSample target = sample_state(stream, robot, cfg);
  sc.start_q = start.q;
  sc.target_q_hidden = target.q;
  sc.target_e = target.e;

  for (int j = 0; j < k_obstacles; ++j) {
    bool placed = false;
    for (int tries = 1; tries <= cfg.rejection_budget; ++tries) {
      const bool segment = (j == 0) ? true : (stream.uniform() < 0.5);
      const Obstacle o = segment ? sample_segment_obstacle(stream, cfg, start.e, sc.target_e)
                                 : sample_obstacle(stream, cfg);
      // the scenario must stay solvable: neither endpoint configuration may
      // touch the obstacle
      if (arm_in_collision(sc.start_q, {o}, robot.dh, robot.shape).any_obstacle()) continue;
      if (arm_in_collision(sc.target_q_hidden, {o}, robot.dh, robot.shape).any_obstacle()) continue;
      sc.obstacles.push_back(o);
      placed = true;
      break;
    }
    if (!placed)
      throw std::runtime_error("generate_scenario: obstacle placement budget exhausted");
  }
  return sc;
}

std::vector<Scenario> generate_scenarios(int k_obstacles, int n, std::uint64_t base_seed,
                                         const RobotModel& robot, const DatagenConfig& cfg,
                                         int jobs) {
  std::vector<Scenario> out(n);
  parallel_for_index(n, jobs, [&](int i) {
    const std::uint64_t seed =
        derive_stream_seed(base_seed, 0x5ce0000000000000ULL + static_cast<std::uint64_t>(i));
    out[i] = generate_scenario(k_obstacles, seed, robot, cfg);
  });
  return out;
}

std::vector<Scenario> filter_am_relevant(const std::vector<Scenario>& scenarios,
                                         const PlannedPathFn& plan_without_obstacle_loss,
                                         const RobotModel& robot, double resolution) {
  std::vector<Scenario> kept;
  for (const auto& sc : scenarios) {
    const std::vector<JointConfig> path = plan_without_obstacle_loss(sc);
    if (path.empty()) continue;
    if (path_hits_obstacles(path, sc.obstacles, robot.dh, robot.shape, resolution))
      kept.push_back(sc);
  }
  return kept;
}

// ---- file formats ----

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw std::runtime_error("malformed number '" + s + "' in " + context);
  }
}

}  // namespace

void write_state_csv(const std::vector<StateSample>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write state csv: " + path);
  out << "q1,q2,q3,q4,q5,q6,q7,e1,e2,e3\n";
  for (const auto& s : samples) {
    for (int i = 0; i < 7; ++i) out << format_double(s.q[i]) << ",";
    out << format_double(s.e[0]) << "," << format_double(s.e[1]) << "," << format_double(s.e[2])
        << "\n";
  }
}

std::vector<StateSample> read_state_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open state csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "q1,q2,q3,q4,q5,q6,q7,e1,e2,e3")
    throw std::runtime_error("state csv: bad header in " + path);
  std::vector<StateSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw std::runtime_error("state csv: expected 10 fields in " + path);
    StateSample s;
    for (int i = 0; i < 7; ++i) s.q[i] = parse_double(f[i], path);
    for (int i = 0; i < 3; ++i) s.e[i] = parse_double(f[7 + i], path);
    out.push_back(s);
  }
  return out;
}

void write_collision_csv(const std::vector<LabeledCollisionSample>& samples,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write collision csv: " + path);
  out << "q1,q2,q3,q4,q5,q6,q7,e1,e2,e3,ox,oy,oh,orad,label\n";
  for (const auto& s : samples) {
    for (int i = 0; i < 7; ++i) out << format_double(s.state.q[i]) << ",";
    for (int i = 0; i < 3; ++i) out << format_double(s.state.e[i]) << ",";
    out << format_double(s.obstacle.x) << "," << format_double(s.obstacle.y) << ","
        << format_double(s.obstacle.h) << "," << format_double(s.obstacle.r) << "," << s.label
        << "\n";
  }
}

std::vector<LabeledCollisionSample> read_collision_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open collision csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "q1,q2,q3,q4,q5,q6,q7,e1,e2,e3,ox,oy,oh,orad,label")
    throw std::runtime_error("collision csv: bad header in " + path);
  std::vector<LabeledCollisionSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 15) throw std::runtime_error("collision csv: expected 15 fields in " + path);
    LabeledCollisionSample s;
    for (int i = 0; i < 7; ++i) s.state.q[i] = parse_double(f[i], path);
    for (int i = 0; i < 3; ++i) s.state.e[i] = parse_double(f[7 + i], path);
    s.obstacle.x = parse_double(f[10], path);
    s.obstacle.y = parse_double(f[11], path);
    s.obstacle.h = parse_double(f[12], path);
    s.obstacle.r = parse_double(f[13], path);
    s.label = static_cast<int>(parse_double(f[14], path));
    out.push_back(s);
  }
  return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["seed"] = s.seed;
  j["start_q"] = std::vector<double>(s.start_q.data(), s.start_q.data() + 7);
  j["target_e"] = std::vector<double>(s.target_e.data(), s.target_e.data() + 3);
  j["target_q_hidden"] =
      std::vector<double>(s.target_q_hidden.data(), s.target_q_hidden.data() + 7);
  Json obs = Json::array();
  for (const auto& o : s.obstacles)
    obs.push_back(Json{{"x", o.x}, {"y", o.y}, {"h", o.h}, {"r", o.r}});
  j["obstacles"] = std::move(obs);
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.seed = j.at("seed").get<std::uint64_t>();
  const auto sq = j.at("start_q").get<std::vector<double>>();
  const auto te = j.at("target_e").get<std::vector<double>>();
  const auto tq = j.at("target_q_hidden").get<std::vector<double>>();
  if (sq.size() != 7 || te.size() != 3 || tq.size() != 7)
    throw std::runtime_error("scenario: bad vector sizes");
  for (int i = 0; i < 7; ++i) s.start_q[i] = sq[i];
  for (int i = 0; i < 3; ++i) s.target_e[i] = te[i];
  for (int i = 0; i < 7; ++i) s.target_q_hidden[i] = tq[i];
  for (const auto& o : j.at("obstacles"))
    s.obstacles.push_back(
        {o.at("x").get<double>(), o.at("y").get<double>(), o.at("h").get<double>(),
         o.at("r").get<double>()});
  return s;
}

}  // namespace

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario: " + path);
  out << scenario_to_json(s).dump(1, '\t') << "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario: " + path);
  Json j;
  in >> j;
  return scenario_from_json(j);
}

void save_manifest(const ScenarioManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  Json j;
  for (const auto& [k, seeds] : m.seeds_per_k) j[std::to_string(k)] = seeds;
  out << j.dump(1, '\t') << "\n";
}

ScenarioManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  Json j;
  in >> j;
  ScenarioManifest m;
  for (auto it = j.begin(); it != j.end(); ++it)
    m.seeds_per_k[std::stoi(it.key())] = it.value().get<std::vector<std::uint64_t>>();
  return m;
}

int validate_collision_labels(const std::vector<LabeledCollisionSample>& samples,
                              const RobotModel& robot) {
  int mismatches = 0;
  for (const auto& s : samples) {
    const CollisionReport rep = arm_in_collision(s.state.q, {s.obstacle}, robot.dh, robot.shape);
    if ((rep.any_obstacle() ? 1 : 0) != s.label) ++mismatches;
  }
  return mismatches;
}

MatrixXd states_to_matrix(const std::vector<StateSample>& samples) {
  MatrixXd m(kStateDim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)).head<7>() = samples[i].q;
    m.col(static_cast<Eigen::Index>(i)).tail<3>() = samples[i].e;
  }
  return m;
}

}  // namespace lspp
