#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vplate/mesh.hpp"

namespace vplate {

/// Both plates after the shared rigid motion that puts the symmetry plane
/// (the bisector of the two contour planes) at z = 0.
struct AlignedPair {
  TriangleMesh sound_board;
  TriangleMesh back;
  RigidTransform transform;        // applied to both plates
  Plane symmetry_plane_before;     // in the input frame
  Plane sound_board_plane_before;  // fitted contour planes, input frame
  Plane back_plane_before;
  double sound_board_residual_mm = 0.0;  // RMS orthogonal contour-to-plane
  double back_residual_mm = 0.0;
};

/// The four dihedral-angle families for one instrument, in degrees.
struct AngleRecord {
  std::string instrument_id;
  double sb_back_signed = 0.0;   // signed parallelism, (-90, 90)
  double sym_horizontal = 0.0;   // [0, 90]
  double sb_horizontal = 0.0;
  double back_horizontal = 0.0;
};

struct AngleHistograms {
  double bin_width_deg = 0.05;
  // histogram name -> bin index k (bin covers [k*w, (k+1)*w)) -> instrument ids
  std::map<std::string, std::map<int, std::vector<std::string>>> bins;

  static const std::vector<std::string>& histogram_names();
};

/// Centre the body at its vertex centroid and rotate its principal axes onto
/// x (largest variance), y, z (smallest). Axis signs fixed so that det = +1
/// and the skew of the x-coordinates is non-negative.
/// Throws "degenerate-pca" when all points are collinear or coplanar.
std::pair<TriangleMesh, RigidTransform> pca_align(const TriangleMesh& body);

/// Total-least-squares plane through a point set (orthogonal regression).
/// Throws "degenerate-plane-fit" for fewer than 3 points or collinear input.
std::pair<Plane, double> fit_plane_orthogonal(const std::vector<Vec3>& points);

/// Bisector of two planes, anchored through the midpoint of the anchor's
/// projections onto both. Throws "undefined-bisector" for anti-parallel planes.
Plane bisector_plane(const Plane& a, const Plane& b, const Vec3& anchor);

/// Unsigned dihedral angle between two planes, degrees in [0, 90].
double dihedral_angle(const Plane& a, const Plane& b);

/// Dihedral angle between the plate planes, positive when the plates are
/// closer at the bottom of the body than at the neck.
double signed_parallelism_angle(const Plane& sb_plane, const Plane& back_plane,
                                const Vec2& neck_direction);

/// Contour extraction -> per-plate orthogonal plane fit -> bisector ->
/// rotation + offset merge with z = 0. The sound board ends above the plane.
AlignedPair align_to_symmetry_plane(const TriangleMesh& sound_board,
                                    const TriangleMesh& back);

/// Bin the four angle families at `bin_width` degrees, anchored at 0.
AngleHistograms angle_report(const std::vector<AngleRecord>& records,
                             double bin_width_deg = 0.05);

std::string angle_histograms_csv(const AngleHistograms& h);
std::string angle_histogram_svg(const AngleHistograms& h, const std::string& name);

}  // namespace vplate
