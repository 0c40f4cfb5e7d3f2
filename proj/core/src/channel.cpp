#include "vplate/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vplate/errors.hpp"
#include "vplate/parallel.hpp"

namespace vplate {

namespace {

// Elevation measured away from the symmetry plane: a channel groove is a dip
// of this quantity on either plate. For backs (z < 0) that means negating z.
inline double relief_value(const ElevationGrid& grid, size_t node) {
  const double z = grid.z[node];
  return grid.side == PlateSide::Back ? -z : z;
}

}  // namespace

int neighbourhood_nodes_per_side(double radius_mm, double node_spacing_mm) {
  // Largest k with k * spacing <= radius (tolerant of binary round-off).
  return static_cast<int>(std::floor(radius_mm / node_spacing_mm + 1e-9));
}

std::vector<size_t> local_minima_on_slice(const Slice& slice,
                                          const ElevationGrid& grid,
                                          double radius_mm) {
  if (!(radius_mm > 0.0))
    throw AnalysisError("invalid-argument", "neighbourhood radius must be positive");
  std::vector<size_t> minima;
  const int n = static_cast<int>(slice.nodes.size());
  const int w = neighbourhood_nodes_per_side(radius_mm, slice.node_spacing);

  for (int i = 0; i < n; ++i) {
    if (std::isnan(grid.z[slice.nodes[i]])) continue;
    const double zi = relief_value(grid, slice.nodes[i]);
    bool is_min = true;
    bool has_neighbour = false;
    // scan outward; an invalid node is a slice break and ends the scan
    for (int dir : {-1, +1}) {
      for (int k = 1; k <= w; ++k) {
        const int j = i + dir * k;
        if (j < 0 || j >= n) break;
        if (std::isnan(grid.z[slice.nodes[j]])) break;
        const double zj = relief_value(grid, slice.nodes[j]);
        has_neighbour = true;
        if (zj <= zi) {  // strict inequality required of the candidate
          is_min = false;
          break;
        }
      }
      if (!is_min) break;
    }
    if (is_min && has_neighbour) minima.push_back(slice.nodes[i]);
  }
  return minima;
}

ChannelPointSet channel_points(const ElevationGrid& grid,
                               const ChannelParams& params,
                               const std::string& plate_id, int jobs) {
  if (params.min_votes < 1 || params.min_votes > 4)
    throw AnalysisError("invalid-argument", "min_votes must be in [1, 4]");

  std::vector<uint8_t> votes(grid.z.size(), 0);
  for (int d = 0; d < 4; ++d) {
    const auto direction = static_cast<SliceDirection>(d);
    const auto slices = grid_slices(grid, direction);
    const uint8_t bit = static_cast<uint8_t>(1u << d);
    // each node lies on exactly one slice per direction: disjoint writes
    parallel_for(slices.size(), jobs, [&](size_t s0, size_t s1) {
      for (size_t s = s0; s < s1; ++s) {
        for (size_t node : local_minima_on_slice(slices[s], grid,
                                                 params.neighbourhood_radius_mm))
          votes[node] |= bit;
      }
    });
  }

  ChannelPointSet set;
  set.plate_id = plate_id;
  set.params = params;
  for (int row = 0; row < grid.ny; ++row) {
    for (int col = 0; col < grid.nx; ++col) {
      const size_t node = grid.index(row, col);
      const int count = std::popcount(static_cast<unsigned>(votes[node]));
      if (count < params.min_votes) continue;
      set.points.push_back({row, col, grid.x_of(col), grid.y_of(row),
                            grid.z[node], votes[node]});
    }
  }
  return set;
}

ChannelPointSet filter_arching_outliers(const ChannelPointSet& raw,
                                        const ElevationGrid& grid) {
  double zmin = 1e300, zmax = -1e300;
  for (size_t node = 0; node < grid.z.size(); ++node) {
    if (std::isnan(grid.z[node])) continue;
    const double v = relief_value(grid, node);
    zmin = std::min(zmin, v);
    zmax = std::max(zmax, v);
  }
  ChannelPointSet out;
  out.plate_id = raw.plate_id;
  out.params = raw.params;
  out.warnings = raw.warnings;

  const double relief = zmax - zmin;
  if (!(relief > 0.0)) {
    out.points = raw.points;
    out.warnings.push_back("degenerate-relief: arching filter skipped");
    return out;
  }
  const double cutoff = zmin + raw.params.arching_filter.max_relative_height * relief;

  // Footprint boundary nodes, bucketed for the optional distance band.
  std::vector<Vec2> boundary;
  const auto& band = raw.params.arching_filter.boundary_band_mm;
  if (band) {
    for (int row = 0; row < grid.ny; ++row) {
      for (int col = 0; col < grid.nx; ++col) {
        if (!grid.valid(row, col)) continue;
        const bool edge = row == 0 || row == grid.ny - 1 || col == 0 ||
                          col == grid.nx - 1 || !grid.valid(row - 1, col) ||
                          !grid.valid(row + 1, col) || !grid.valid(row, col - 1) ||
                          !grid.valid(row, col + 1);
        if (edge) boundary.emplace_back(grid.x_of(col), grid.y_of(row));
      }
    }
  }
  auto near_boundary = [&](const ChannelPoint& p) {
    const double limit2 = *band * *band;
    for (const Vec2& b : boundary) {
      const double dx = b.x() - p.x, dy = b.y() - p.y;
      if (dx * dx + dy * dy <= limit2) return true;
    }
    return false;
  };

  for (const ChannelPoint& p : raw.points) {
    const double relief_z = grid.side == PlateSide::Back ? -p.z : p.z;
    if (relief_z > cutoff) continue;
    if (band && !near_boundary(p)) continue;
    out.points.push_back(p);
  }
  return out;
}

std::string vote_mask_string(uint8_t votes) {
  static const char letters[4] = {'H', 'V', 'D', 'A'};
  std::string s(4, '-');
  for (int i = 0; i < 4; ++i)
    if (votes & (1u << i)) s[i] = letters[i];
  return s;
}

std::string channel_point_set_csv(const ChannelPointSet& set) {
  std::ostringstream out;
  out << "row,col,x_mm,y_mm,z_mm,votes\n";
  char buf[160];
  for (const ChannelPoint& p : set.points) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f,%.6f,%s\n", p.row, p.col,
                  p.x, p.y, p.z, vote_mask_string(p.votes).c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace vplate
