#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vplate/elevation.hpp"

namespace vplate {

struct ArchingFilterParams {
  // Keep only points whose elevation above the plate's global minimum is at
  // most this fraction of the total relief.
  double max_relative_height = 0.3;
  // Optionally also require points to lie within this distance (mm) of the
  // plate's footprint boundary.
  std::optional<double> boundary_band_mm;
};

struct ChannelParams {
  double neighbourhood_radius_mm = 2.0;  // 2 for violins/violas, 5 for cellos
  int min_votes = 2;
  ArchingFilterParams arching_filter;
};

struct ChannelPoint {
  int row = 0;
  int col = 0;
  double x = 0.0, y = 0.0, z = 0.0;  // mm
  uint8_t votes = 0;                 // bitmask, bit i = SliceDirection i
};

struct ChannelPointSet {
  std::string plate_id;
  std::vector<ChannelPoint> points;  // ordered by (row, col)
  ChannelParams params;
  std::vector<std::string> warnings;
};

/// How many nodes on each side of a candidate fall within the physical
/// radius along a slice (floor(radius / spacing)).
int neighbourhood_nodes_per_side(double radius_mm, double node_spacing_mm);

/// Strict local minima of one slice. Invalid nodes break the slice: the scan
/// stops at them, and truncated neighbourhoods consult only the nodes that
/// exist (the behaviour at plate edges).
std::vector<size_t> local_minima_on_slice(const Slice& slice,
                                          const ElevationGrid& grid,
                                          double radius_mm);

/// Nodes that are strict local minima in at least `min_votes` of the four
/// slice directions through them. No arching filter applied.
ChannelPointSet channel_points(const ElevationGrid& grid,
                               const ChannelParams& params,
                               const std::string& plate_id = {}, int jobs = 0);

/// Drop channel points high on the archings (and, when a boundary band is
/// set, points far from the footprint boundary).
ChannelPointSet filter_arching_outliers(const ChannelPointSet& raw,
                                        const ElevationGrid& grid);

/// Vote mask as "HVDA" with '-' for missing directions, e.g. "HV-A".
std::string vote_mask_string(uint8_t votes);

std::string channel_point_set_csv(const ChannelPointSet& set);

}  // namespace vplate
