#pragma once

#include <array>
#include <string>
#include <vector>

#include "vplate/geometry.hpp"

namespace vplate {

/// Indexed triangle soup in millimetres.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string name;

  /// Throws AnalysisError ("empty-mesh", "invalid-vertex", "degenerate-face")
  /// if an invariant is violated.
  void validate() const;

  double face_area(int f) const;
  Vec3 centroid() const;
};

TriangleMesh apply_rigid_transform(const TriangleMesh& mesh,
                                   const RigidTransform& t);

/// Closed chains of edges that belong to exactly one face, longest first.
/// Loops shorter than 10 points are dropped as scan noise, unless no loop
/// reaches that size (tiny synthetic meshes keep their boundary).
/// Throws "non-manifold-edge" if an edge is shared by more than two faces.
std::vector<Polyline3> boundary_loops(const TriangleMesh& mesh);

}  // namespace vplate
