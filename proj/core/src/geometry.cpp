#include "lspp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lspp {

bool ArmShapeModel::excluded(int i, int j) const {
  for (const auto& [a, b] : self_collision_exclude) {
    if ((a == i && b == j) || (a == j && b == i)) return true;
  }
  return false;
}

bool CollisionReport::any() const {
  if (self_collision || table) return true;
  return any_obstacle();
}

bool CollisionReport::any_obstacle() const {
  for (bool hit : obstacle_hits)
    if (hit) return true;
  return false;
}

double point_cylinder_distance(const Vector3d& p, const Obstacle& o) {
  const double radial = std::hypot(p.x() - o.x, p.y() - o.y);
  const double dr = radial - o.r;
  const double dz = std::max(-p.z(), p.z() - o.h);
  if (dr <= 0.0 && dz <= 0.0) return std::max(dr, dz);  // inside: -depth
  return std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
}

double capsule_cylinder_distance(const Capsule& c, const Obstacle& o) {
  constexpr double kTolMetres = 1e-6;
  const Vector3d axis = c.p1 - c.p0;
  const double len = axis.norm();
  if (len < kTolMetres) return point_cylinder_distance(c.p0, o) - c.radius;

  const auto f = [&](double t) { return point_cylinder_distance(c.p0 + t * axis, o); };
  double lo = 0.0, hi = 1.0;
  while ((hi - lo) * len > kTolMetres) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double d = std::min({f(0.5 * (lo + hi)), f(0.0), f(1.0)});
  return d - c.radius;
}

double segment_segment_distance(const Vector3d& p0, const Vector3d& p1,
                                const Vector3d& q0, const Vector3d& q1) {
  // Closest points of two segments, clamped pairwise (Ericson 5.1.9).
  const Vector3d d1 = p1 - p0;
  const Vector3d d2 = q1 - q0;
  const Vector3d r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kEps = 1e-14;

  double s = 0.0, t = 0.0;
  if (a <= kEps && e <= kEps) {
    return (p0 - q0).norm();
  }
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > kEps)
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

std::vector<Capsule> arm_capsules(const JointConfig& q, const DhTable& dh,
                                  const ArmShapeModel& model) {
  const auto frames = link_frames(q, dh);
  std::vector<Capsule> out;
  out.reserve(model.capsules.size());
  for (const auto& ac : model.capsules) {
    if (ac.frame_a < 0 || ac.frame_b < 0 || ac.frame_a >= static_cast<int>(frames.size()) ||
        ac.frame_b >= static_cast<int>(frames.size()))
      throw std::invalid_argument("arm_capsules: frame index out of range");
    out.push_back({frames[ac.frame_a].translation(), frames[ac.frame_b].translation(), ac.radius});
  }
  return out;
}

CollisionReport arm_in_collision(const JointConfig& q, const std::vector<Obstacle>& obstacles,
                                 const DhTable& dh, const ArmShapeModel& model) {
  const auto capsules = arm_capsules(q, dh, model);
  const int n = static_cast<int>(capsules.size());
  CollisionReport report;

  for (int i = 0; i < n && !report.self_collision; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (model.excluded(i, j)) continue;
      const double d = segment_segment_distance(capsules[i].p0, capsules[i].p1,
                                                capsules[j].p0, capsules[j].p1);
      if (d < capsules[i].radius + capsules[j].radius) {
        report.self_collision = true;
        break;
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (std::find(model.table_exclude.begin(), model.table_exclude.end(), i) !=
        model.table_exclude.end())
      continue;
    if (std::min(capsules[i].p0.z(), capsules[i].p1.z()) < capsules[i].radius) {
      report.table = true;
      break;
    }
  }

  report.obstacle_hits.assign(obstacles.size(), false);
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      if (capsule_cylinder_distance(capsules[i], obstacles[k]) <= 0.0) {
        report.obstacle_hits[k] = true;
        break;
      }
    }
  }
  return report;
}

namespace {

template <typename Pred>
bool any_interpolated_config(const std::vector<JointConfig>& path, double resolution, Pred&& pred) {
  if (path.empty()) throw std::invalid_argument("path check: empty path");
  if (resolution <= 0.0) throw std::invalid_argument("path check: resolution must be positive");
  if (pred(path.front())) return true;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const JointConfig delta = path[s + 1] - path[s];
    const double span = delta.cwiseAbs().maxCoeff();
    // power-of-two subdivision keeps coarse check points a subset of finer
    // ones, so collisions found at a coarse resolution persist when refining
    int steps = 1;
    while (span / steps > resolution && steps < (1 << 24)) steps *= 2;
    for (int t = 1; t <= steps; ++t) {
      const JointConfig qi = path[s] + (static_cast<double>(t) / steps) * delta;
      if (pred(qi)) return true;
    }
  }
  return false;
}

}  // namespace

bool path_in_collision(const std::vector<JointConfig>& path, const std::vector<Obstacle>& obstacles,
                       const DhTable& dh, const ArmShapeModel& model, double resolution) {
  return any_interpolated_config(path, resolution, [&](const JointConfig& q) {
    return arm_in_collision(q, obstacles, dh, model).any();
  });
}

bool path_hits_obstacles(const std::vector<JointConfig>& path, const std::vector<Obstacle>& obstacles,
                         const DhTable& dh, const ArmShapeModel& model, double resolution) {
  if (obstacles.empty()) return false;
  return any_interpolated_config(path, resolution, [&](const JointConfig& q) {
    return arm_in_collision(q, obstacles, dh, model).any_obstacle();
  });
}

}  // namespace lspp
