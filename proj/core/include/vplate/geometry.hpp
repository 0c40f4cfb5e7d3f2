#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <vector>

namespace vplate {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

/// Rigid motion v -> R*v + t, with R a proper rotation (det = +1).
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& v) const { return rotation * v + translation; }

  /// this ∘ other: apply `other` first, then this.
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation,
            rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  /// Columns orthonormal to `tol` and det = +1.
  bool is_valid(double tol = 1e-9) const {
    Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && rotation.determinant() > 0;
  }
};

/// Oriented infinite plane {p : normal·p = offset}, |normal| = 1.
/// Canonical orientation: normal.z >= 0; if z == 0 then x >= 0; if both 0, y > 0.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;  // mm

  static Plane horizontal(double z = 0.0) { return {Vec3::UnitZ(), z}; }

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }

  Vec3 project(const Vec3& p) const { return p - signed_distance(p) * normal; }

  /// Flip normal/offset, if needed, into the canonical half-space.
  Plane canonical() const {
    const Vec3& n = normal;
    bool flip = false;
    if (n.z() < 0.0)
      flip = true;
    else if (n.z() == 0.0 && n.x() < 0.0)
      flip = true;
    else if (n.z() == 0.0 && n.x() == 0.0 && n.y() < 0.0)
      flip = true;
    return flip ? Plane{-normal, -offset} : *this;
  }
};

/// Ordered 3D point chain; closed loops do not repeat the first point.
struct Polyline3 {
  std::vector<Vec3> points;
  bool closed = false;

  double length() const {
    double len = 0.0;
    for (size_t i = 1; i < points.size(); ++i)
      len += (points[i] - points[i - 1]).norm();
    if (closed && points.size() > 2)
      len += (points.front() - points.back()).norm();
    return len;
  }
};

inline double deg_from_rad(double r) { return r * 180.0 / EIGEN_PI; }
inline double rad_from_deg(double d) { return d * EIGEN_PI / 180.0; }

}  // namespace vplate
