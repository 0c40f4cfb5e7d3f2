#pragma once

#include <string>
#include <vector>

#include "vplate/mesh.hpp"

namespace vplate {

enum class PlateSide { SoundBoard, Back };

inline const char* to_string(PlateSide s) {
  return s == PlateSide::SoundBoard ? "sound_board" : "back";
}

struct ContourLevel {
  double z_level = 0.0;  // mm
  std::vector<Polyline3> polylines;
};

struct ContourSet {
  std::string plate_id;
  PlateSide side = PlateSide::SoundBoard;
  std::vector<ContourLevel> levels;  // strictly increasing z
  double z_min = 0.0;                // exact elevation range of the plate
  double z_max = 0.0;
};

/// Exact triangle/plane intersection segments chained into polylines.
/// Triangles lying in the plane contribute their three edges.
std::vector<Polyline3> plane_mesh_intersection(const TriangleMesh& mesh,
                                               const Plane& plane);

/// Horizontal cuts at every integer multiple of `spacing` inside the plate's
/// elevation range. The plate must already be aligned (symmetry plane = z=0).
ContourSet contour_lines(const TriangleMesh& plate, double spacing = 1.0,
                         const std::string& plate_id = {},
                         PlateSide side = PlateSide::SoundBoard);

std::string contour_set_csv(const ContourSet& contours);

}  // namespace vplate
