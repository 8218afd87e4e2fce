#ifndef LSPP_TYPES_HPP_
#define LSPP_TYPES_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace lspp {

inline constexpr int kNumJoints = 7;
inline constexpr int kStateDim = 10;  // 7 joint angles + 3 end-effector coords
inline constexpr int kLatentDim = 7;

using Vector7d = Eigen::Matrix<double, 7, 1>;
using Vector3d = Eigen::Vector3d;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

/// Joint configuration q, radians.
using JointConfig = Vector7d;

/// End-effector position e, metres, expressed in the base frame.
using EEPosition = Vector3d;

/// Latent planning variable z.
using LatentVector = Vector7d;

/// A VAE data point: paired joint configuration and end-effector position.
struct RobotState {
  JointConfig q;
  EEPosition e;

  Eigen::Matrix<double, kStateDim, 1> stacked() const {
    Eigen::Matrix<double, kStateDim, 1> x;
    x << q, e;
    return x;
  }
  static RobotState from_stacked(const Eigen::Ref<const VectorXd>& x) {
    if (x.size() != kStateDim) throw std::invalid_argument("RobotState: expected 10 values");
    RobotState s;
    s.q = x.head<7>();
    s.e = x.tail<3>();
    return s;
  }
};

/// Upright cylinder obstacle resting on the table plane z = 0.
/// Occupies {(u,v,w) : (u-x)^2 + (v-y)^2 <= r^2, 0 <= w <= h}.
struct Obstacle {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;  // height, metres
  double r = 0.0;  // radius, metres

  Eigen::Vector4d stacked() const { return {x, y, h, r}; }
};

}  // namespace lspp

#endif  // LSPP_TYPES_HPP_
