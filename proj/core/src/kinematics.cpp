#include "lspp/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace lspp {

namespace {

Transform dh_transform(const DhRow& row, double q) {
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  const double theta = row.theta_offset + q;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  // RotX(alpha) * TransX(a) * RotZ(theta) * TransZ(d), written out
  Eigen::Matrix4d m;
  m << ct, -st, 0.0, row.a,
       st * ca, ct * ca, -sa, -sa * row.d,
       st * sa, ct * sa, ca, ca * row.d,
       0.0, 0.0, 0.0, 1.0;
  Transform t;
  t.matrix() = m;
  return t;
}

}  // namespace

std::vector<Transform> link_frames(const JointConfig& q, const DhTable& dh) {
  if (!dh.valid()) throw std::invalid_argument("link_frames: DH table must have 8 rows");
  std::vector<Transform> frames;
  frames.reserve(kNumJoints + 2);
  Transform t = Transform::Identity();
  frames.push_back(t);
  for (int i = 0; i < kNumJoints; ++i) {
    t = t * dh_transform(dh.rows[i], q[i]);
    frames.push_back(t);
  }
  t = t * dh_transform(dh.rows[kNumJoints], 0.0);
  frames.push_back(t);
  return frames;
}

EEPosition forward_kinematics(const JointConfig& q, const DhTable& dh) {
  return link_frames(q, dh).back().translation();
}

Eigen::Matrix<double, 3, 7> positional_jacobian(const JointConfig& q, const DhTable& dh) {
  const auto frames = link_frames(q, dh);
  const Vector3d p_e = frames.back().translation();
  Eigen::Matrix<double, 3, 7> jac;
  for (int i = 0; i < kNumJoints; ++i) {
    // joint i rotates about the z axis of frame i+1 (frames[0] is the base)
    const Vector3d z = frames[i + 1].linear().col(2);
    const Vector3d p = frames[i + 1].translation();
    jac.col(i) = z.cross(p_e - p);
  }
  return jac;
}

bool within_limits(const JointConfig& q, const JointLimits& lim) {
  return (q.array() >= lim.lower.array()).all() && (q.array() <= lim.upper.array()).all();
}

}  // namespace lspp
