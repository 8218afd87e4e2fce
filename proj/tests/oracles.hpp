#ifndef LSPP_TESTS_ORACLES_HPP_
#define LSPP_TESTS_ORACLES_HPP_

// Independent oracles for the test suite. Everything here is written from
// first principles on plain arrays, deliberately sharing no code with the
// library implementations it checks.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 mul4(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat4 rot_x(double a) {
  Mat4 m = identity4();
  m[1][1] = std::cos(a);
  m[1][2] = -std::sin(a);
  m[2][1] = std::sin(a);
  m[2][2] = std::cos(a);
  return m;
}

inline Mat4 rot_z(double a) {
  Mat4 m = identity4();
  m[0][0] = std::cos(a);
  m[0][1] = -std::sin(a);
  m[1][0] = std::sin(a);
  m[1][1] = std::cos(a);
  return m;
}

inline Mat4 trans_x(double v) {
  Mat4 m = identity4();
  m[0][3] = v;
  return m;
}

inline Mat4 trans_z(double v) {
  Mat4 m = identity4();
  m[2][3] = v;
  return m;
}

// Franka Panda, modified DH (Craig): transform per row is the elementary
// product RotX(alpha) * TransX(a) * RotZ(theta) * TransZ(d). Values restated
// here independently of the library's constants file.
struct DhRowOracle {
  double a, d, alpha;
};

inline const std::array<DhRowOracle, 8>& panda_rows() {
  static const std::array<DhRowOracle, 8> rows = {{
      {0.0, 0.333, 0.0},
      {0.0, 0.0, -M_PI_2},
      {0.0, 0.316, M_PI_2},
      {0.0825, 0.0, M_PI_2},
      {-0.0825, 0.384, -M_PI_2},
      {0.0, 0.0, M_PI_2},
      {0.088, 0.0, M_PI_2},
      {0.0, 0.107, 0.0},
  }};
  return rows;
}

/// Chain of 9 frames (base, joints 1..7, flange) as homogeneous matrices.
inline std::vector<Mat4> fk_frames(const std::array<double, 7>& q) {
  std::vector<Mat4> frames;
  Mat4 t = identity4();
  frames.push_back(t);
  for (int i = 0; i < 8; ++i) {
    const auto& row = panda_rows()[i];
    const double theta = i < 7 ? q[i] : 0.0;
    Mat4 step = mul4(mul4(rot_x(row.alpha), trans_x(row.a)), mul4(rot_z(theta), trans_z(row.d)));
    t = mul4(t, step);
    frames.push_back(t);
  }
  return frames;
}

inline std::array<double, 3> fk_position(const std::array<double, 7>& q) {
  const Mat4 t = fk_frames(q).back();
  return {t[0][3], t[1][3], t[2][3]};
}

/// Distance from a point to the solid upright cylinder {radial <= r,
/// 0 <= z <= h} at (cx, cy), via closest-point projection. Zero inside.
inline double point_to_cylinder_solid(double px, double py, double pz, double cx, double cy,
                                      double h, double r) {
  const double dx = px - cx;
  const double dy = py - cy;
  const double radial = std::sqrt(dx * dx + dy * dy);
  const double scale = radial > r ? r / radial : 1.0;
  const double qx = cx + dx * scale;
  const double qy = cy + dy * scale;
  const double qz = std::min(std::max(pz, 0.0), h);
  const double ex = px - qx, ey = py - qy, ez = pz - qz;
  return std::sqrt(ex * ex + ey * ey + ez * ez);
}

/// Brute-force capsule/cylinder collision: sample points along the axis and
/// test against the capsule-radius inflation of the cylinder.
inline bool capsule_cylinder_collides(const std::array<double, 3>& p0,
                                      const std::array<double, 3>& p1, double capsule_radius,
                                      double cx, double cy, double h, double r,
                                      int samples = 10000) {
  for (int i = 0; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const double x = p0[0] + t * (p1[0] - p0[0]);
    const double y = p0[1] + t * (p1[1] - p0[1]);
    const double z = p0[2] + t * (p1[2] - p0[2]);
    if (point_to_cylinder_solid(x, y, z, cx, cy, h, r) <= capsule_radius) return true;
  }
  return false;
}

/// Minimum distance between two segments by dense sampling (slow, test only).
inline double segment_distance_sampled(const std::array<double, 3>& p0,
                                       const std::array<double, 3>& p1,
                                       const std::array<double, 3>& q0,
                                       const std::array<double, 3>& q1, int samples = 400) {
  double best = 1e300;
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    const double ax = p0[0] + s * (p1[0] - p0[0]);
    const double ay = p0[1] + s * (p1[1] - p0[1]);
    const double az = p0[2] + s * (p1[2] - p0[2]);
    for (int j = 0; j <= samples; ++j) {
      const double t = static_cast<double>(j) / samples;
      const double bx = q0[0] + t * (q1[0] - q0[0]);
      const double by = q0[1] + t * (q1[1] - q0[1]);
      const double bz = q0[2] + t * (q1[2] - q0[2]);
      const double d2 = (ax - bx) * (ax - bx) + (ay - by) * (ay - by) + (az - bz) * (az - bz);
      if (d2 < best) best = d2;
    }
  }
  return std::sqrt(best);
}

/// Central finite difference of a scalar function.
inline double central_difference(const std::function<double(double)>& f, double x,
                                 double step = 1e-6) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps (test-side
/// alternative to the library eigensolver). Returns values sorted descending.
template <int N>
std::array<double, N> jacobi_eigenvalues(std::array<std::array<double, N>, N> a,
                                         int sweeps = 50) {
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < N; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::array<double, N> vals;
  for (int i = 0; i < N; ++i) vals[i] = a[i][i];
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return vals;
}

}  // namespace oracle

#endif  // LSPP_TESTS_ORACLES_HPP_
