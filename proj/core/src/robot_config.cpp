#include "lspp/robot_config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lspp {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector7d vec7(std::initializer_list<double> v) {
  Vector7d out;
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

RobotModel panda_model() {
  RobotModel m;

  // Modified DH rows (Craig convention), joints 1..7 then the fixed flange.
  m.dh.rows = {
      {0.0, 0.333, 0.0, 0.0},
      {0.0, 0.0, -kPi / 2, 0.0},
      {0.0, 0.316, kPi / 2, 0.0},
      {0.0825, 0.0, kPi / 2, 0.0},
      {-0.0825, 0.384, -kPi / 2, 0.0},
      {0.0, 0.0, kPi / 2, 0.0},
      {0.088, 0.0, kPi / 2, 0.0},
      {0.0, 0.107, 0.0, 0.0},  // flange
  };

  m.limits.lower = vec7({-2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175, -2.8973});
  m.limits.upper = vec7({2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973});
  m.limits.velocity = vec7({2.1750, 2.1750, 2.1750, 2.1750, 2.6100, 2.6100, 2.6100});
  m.limits.acceleration = vec7({15.0, 7.5, 10.0, 12.5, 15.0, 20.0, 20.0});
  m.limits.jerk = vec7({7500.0, 3750.0, 5000.0, 6250.0, 7500.0, 10000.0, 10000.0});

  // Capsules span consecutive joint origins plus the flange. The shoulder
  // column and the shoulder joint are the bulkiest parts of the arm.
  m.shape.capsules = {
      {0, 1, 0.09}, {1, 2, 0.09}, {2, 3, 0.06}, {3, 4, 0.06},
      {4, 5, 0.06}, {5, 6, 0.06}, {6, 7, 0.06}, {7, 8, 0.06},
  };
  // Adjacent pairs touch at shared frames. (0,2) and (4,6) share a joint
  // origin because frames 1/2 and 5/6 coincide for this chain (d=0, a=0
  // rows); (2,4), (4,7) and (5,7) are bridged by the short elbow/wrist links
  // (0.0825 m and 0.088 m, below the capsule radius sums), so they intersect
  // by construction at every configuration.
  m.shape.self_collision_exclude = {
      {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7},
      {0, 2}, {4, 6}, {2, 4}, {4, 7}, {5, 7},
  };
  m.shape.table_exclude = {0};

  m.reach_bound = 1.3;
  return m;
}

namespace {

[[noreturn]] void fail(int line_no, const std::string& msg) {
  std::ostringstream os;
  os << "robot config line " << line_no << ": " << msg;
  throw std::runtime_error(os.str());
}

Vector7d read7(std::istringstream& is, int line_no, const char* what) {
  Vector7d v;
  for (int i = 0; i < 7; ++i) {
    if (!(is >> v[i])) fail(line_no, std::string("expected 7 values for ") + what);
  }
  return v;
}

}  // namespace

RobotModel parse_robot_config(std::istream& in) {
  RobotModel m;
  m.dh.rows.clear();
  m.shape.capsules.clear();
  m.shape.self_collision_exclude.clear();
  m.shape.table_exclude.clear();
  bool have_lower = false, have_upper = false, have_vel = false, have_acc = false,
       have_jerk = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::string key;
    if (!(is >> key)) continue;

    if (key == "version") {
      int v;
      if (!(is >> v) || v != 1) fail(line_no, "unsupported version");
    } else if (key == "dh") {
      DhRow row;
      if (!(is >> row.a >> row.d >> row.alpha >> row.theta_offset))
        fail(line_no, "dh expects: a d alpha theta_offset");
      m.dh.rows.push_back(row);
    } else if (key == "joint_lower") {
      m.limits.lower = read7(is, line_no, "joint_lower");
      have_lower = true;
    } else if (key == "joint_upper") {
      m.limits.upper = read7(is, line_no, "joint_upper");
      have_upper = true;
    } else if (key == "joint_velocity") {
      m.limits.velocity = read7(is, line_no, "joint_velocity");
      have_vel = true;
    } else if (key == "joint_acceleration") {
      m.limits.acceleration = read7(is, line_no, "joint_acceleration");
      have_acc = true;
    } else if (key == "joint_jerk") {
      m.limits.jerk = read7(is, line_no, "joint_jerk");
      have_jerk = true;
    } else if (key == "capsule") {
      ArmCapsule c;
      if (!(is >> c.frame_a >> c.frame_b >> c.radius))
        fail(line_no, "capsule expects: frame_a frame_b radius");
      if (c.radius <= 0.0) fail(line_no, "capsule radius must be positive");
      m.shape.capsules.push_back(c);
    } else if (key == "self_collision_exclude") {
      int i, j;
      if (!(is >> i >> j)) fail(line_no, "self_collision_exclude expects: i j");
      m.shape.self_collision_exclude.emplace_back(i, j);
    } else if (key == "table_exclude") {
      int i;
      if (!(is >> i)) fail(line_no, "table_exclude expects: capsule index");
      m.shape.table_exclude.push_back(i);
    } else if (key == "reach_bound") {
      if (!(is >> m.reach_bound)) fail(line_no, "reach_bound expects: metres");
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  if (!m.dh.valid()) throw std::runtime_error("robot config: expected 8 dh rows");
  if (!(have_lower && have_upper && have_vel && have_acc && have_jerk))
    throw std::runtime_error("robot config: missing joint limit directives");
  if ((m.limits.lower.array() >= m.limits.upper.array()).any())
    throw std::runtime_error("robot config: lower limits must be below upper limits");
  if (m.shape.capsules.empty()) throw std::runtime_error("robot config: no capsules");
  return m;
}

RobotModel load_robot_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open robot config: " + path);
  return parse_robot_config(in);
}

void save_robot_config(const RobotModel& m, std::ostream& out) {
  out << std::setprecision(17);
  out << "# robot constants: modified DH rows, limits, collision capsules\n";
  out << "version 1\n";
  out << "# dh <a> <d> <alpha> <theta_offset>   (joints 1..7, then flange)\n";
  for (const auto& r : m.dh.rows)
    out << "dh " << r.a << " " << r.d << " " << r.alpha << " " << r.theta_offset << "\n";
  const auto emit7 = [&](const char* key, const Vector7d& v) {
    out << key;
    for (int i = 0; i < 7; ++i) out << " " << v[i];
    out << "\n";
  };
  emit7("joint_lower", m.limits.lower);
  emit7("joint_upper", m.limits.upper);
  emit7("joint_velocity", m.limits.velocity);
  emit7("joint_acceleration", m.limits.acceleration);
  emit7("joint_jerk", m.limits.jerk);
  out << "# capsule <frame_a> <frame_b> <radius>\n";
  for (const auto& c : m.shape.capsules)
    out << "capsule " << c.frame_a << " " << c.frame_b << " " << c.radius << "\n";
  for (const auto& [i, j] : m.shape.self_collision_exclude)
    out << "self_collision_exclude " << i << " " << j << "\n";
  for (int i : m.shape.table_exclude) out << "table_exclude " << i << "\n";
  out << "reach_bound " << m.reach_bound << "\n";
}

}  // namespace lspp
