#ifndef LSPP_GEOMETRY_HPP_
#define LSPP_GEOMETRY_HPP_

#include <utility>
#include <vector>

#include "lspp/kinematics.hpp"
#include "lspp/types.hpp"

namespace lspp {

/// Line segment inflated by a radius.
struct Capsule {
  Vector3d p0;
  Vector3d p1;
  double radius = 0.0;
};

/// One collision capsule of the arm, spanning two chain frames (indices into
/// the link_frames output, 0 = base .. 8 = flange).
struct ArmCapsule {
  int frame_a = 0;
  int frame_b = 0;
  double radius = 0.0;
};

/// Capsule approximation of the arm plus the bookkeeping needed for
/// self-collision and table checks.
struct ArmShapeModel {
  std::vector<ArmCapsule> capsules;
  /// Capsule index pairs skipped by the self-collision check. Adjacent
  /// capsules and capsules sharing a joint origin touch by construction.
  std::vector<std::pair<int, int>> self_collision_exclude;
  /// Capsule indices skipped by the table check (the base column sits on it).
  std::vector<int> table_exclude;

  bool excluded(int i, int j) const;
};

struct CollisionReport {
  bool self_collision = false;
  bool table = false;
  std::vector<bool> obstacle_hits;

  bool any() const;
  bool any_obstacle() const;
};

/// Signed distance between a point and the solid cylinder: negative inside.
double point_cylinder_distance(const Vector3d& p, const Obstacle& o);

/// Signed capsule/cylinder clearance: min over the capsule axis of the point
/// distance to the solid cylinder, minus the capsule radius. <= 0 means
/// collision. The axis minimisation uses ternary search (the signed distance
/// to a convex solid is convex along a line), tolerance 1e-6 m.
double capsule_cylinder_distance(const Capsule& c, const Obstacle& o);

/// Distance between two segments (Ericson-style closest point pair).
double segment_segment_distance(const Vector3d& p0, const Vector3d& p1,
                                const Vector3d& q0, const Vector3d& q1);

/// Capsules of the arm at configuration q.
std::vector<Capsule> arm_capsules(const JointConfig& q, const DhTable& dh,
                                  const ArmShapeModel& model);

CollisionReport arm_in_collision(const JointConfig& q, const std::vector<Obstacle>& obstacles,
                                 const DhTable& dh, const ArmShapeModel& model);

/// True iff any configuration along the joint-space linear interpolation of
/// the path collides (self, table or obstacle). Consecutive checked configs
/// differ by at most `resolution` in max-norm.
bool path_in_collision(const std::vector<JointConfig>& path, const std::vector<Obstacle>& obstacles,
                       const DhTable& dh, const ArmShapeModel& model, double resolution = 0.02);

/// Obstacle hits only; self and table collisions are ignored. Used by the
/// AM-relevance filter, which asks specifically about obstacle contact.
bool path_hits_obstacles(const std::vector<JointConfig>& path, const std::vector<Obstacle>& obstacles,
                         const DhTable& dh, const ArmShapeModel& model, double resolution = 0.02);

}  // namespace lspp

#endif  // LSPP_GEOMETRY_HPP_
