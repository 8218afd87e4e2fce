#ifndef LSPP_KINEMATICS_HPP_
#define LSPP_KINEMATICS_HPP_

#include <vector>

#include <Eigen/Dense>

#include "lspp/types.hpp"

namespace lspp {

/// One modified-DH (Craig convention) row. The transform from frame i-1 to
/// frame i is RotX(alpha) * TransX(a) * RotZ(theta_offset + q_i) * TransZ(d),
/// with q_i = 0 for the fixed flange row.
struct DhRow {
  double a = 0.0;             // metres
  double d = 0.0;             // metres
  double alpha = 0.0;         // radians
  double theta_offset = 0.0;  // radians
};

/// Fixed kinematic chain: 7 actuated rows followed by the flange row.
struct DhTable {
  std::vector<DhRow> rows;  // size kNumJoints + 1

  bool valid() const { return rows.size() == kNumJoints + 1; }
};

struct JointLimits {
  Vector7d lower;
  Vector7d upper;
  Vector7d velocity;      // rad/s
  Vector7d acceleration;  // rad/s^2
  Vector7d jerk;          // rad/s^3
};

using Transform = Eigen::Isometry3d;

/// Frames along the chain: base (identity), one per joint origin, flange.
/// Returns kNumJoints + 2 = 9 transforms. The z axis of frame i (i = 1..7)
/// is the axis of joint i and its origin lies on that axis.
std::vector<Transform> link_frames(const JointConfig& q, const DhTable& dh);

/// Flange origin in the base frame.
EEPosition forward_kinematics(const JointConfig& q, const DhTable& dh);

/// 3x7 positional Jacobian of the flange origin: column i equals
/// z_i x (p_flange - p_i) with frames from link_frames.
Eigen::Matrix<double, 3, 7> positional_jacobian(const JointConfig& q, const DhTable& dh);

/// Closed-interval limit check, position limits only.
bool within_limits(const JointConfig& q, const JointLimits& lim);

}  // namespace lspp

#endif  // LSPP_KINEMATICS_HPP_
