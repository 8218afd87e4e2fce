#ifndef LSPP_ROBOT_CONFIG_HPP_
#define LSPP_ROBOT_CONFIG_HPP_

#include <iosfwd>
#include <string>

#include "lspp/geometry.hpp"
#include "lspp/kinematics.hpp"

namespace lspp {

/// Everything the pipeline needs to know about the arm: kinematic chain,
/// limits, collision shape and the workspace reach bound.
struct RobotModel {
  DhTable dh;
  JointLimits limits;
  ArmShapeModel shape;
  double reach_bound = 1.3;  // metres, upper bound on |FK(q)| for in-limit q
};

/// Built-in constants for the Franka Panda arm (modified DH rows, joint and
/// dynamic limits from the public arm documentation; capsule radii are ours).
RobotModel panda_model();

/// Key-value text format, one directive per line, '#' comments.
/// See configs/panda.txt for the documented reference file.
RobotModel load_robot_config(const std::string& path);
RobotModel parse_robot_config(std::istream& in);
void save_robot_config(const RobotModel& model, std::ostream& out);

}  // namespace lspp

#endif  // LSPP_ROBOT_CONFIG_HPP_
