#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vplate/contours.hpp"
#include "vplate/mesh.hpp"

namespace vplate {

enum class SliceDirection { Horizontal, Vertical, DiagPlus, DiagMinus };

/// Regular horizontal grid of plate elevations. Invalid cells (outside the
/// footprint or over f-holes) hold NaN.
struct ElevationGrid {
  Vec2 origin = Vec2::Zero();  // (x, y) of node (0, 0), mm
  double step = 0.25;          // mm
  int nx = 0;
  int ny = 0;
  std::vector<double> z;  // row-major, ny rows of nx; NaN = invalid
  PlateSide side = PlateSide::SoundBoard;

  size_t index(int row, int col) const {
    return static_cast<size_t>(row) * static_cast<size_t>(nx) + col;
  }
  bool valid(int row, int col) const { return !std::isnan(z[index(row, col)]); }
  double x_of(int col) const { return origin.x() + col * step; }
  double y_of(int row) const { return origin.y() + row * step; }
};

/// One run of grid nodes along a sampling direction.
struct Slice {
  SliceDirection direction = SliceDirection::Horizontal;
  std::vector<size_t> nodes;  // linear indices into ElevationGrid::z, in order
  double node_spacing = 0.0;  // physical distance between consecutive nodes, mm
};

/// Sample an aligned plate over a regular grid. The vertical line through each
/// node is intersected with the mesh; where edges fold under, the triangle
/// with max |z| wins (the outer surface). Throws "empty-footprint" if no node
/// hits the plate.
ElevationGrid resample_grid(const TriangleMesh& plate, double step = 0.25,
                            PlateSide side = PlateSide::SoundBoard, int jobs = 0);

/// All slices of the grid in one direction. Each node lies on exactly one
/// slice per direction.
std::vector<Slice> grid_slices(const ElevationGrid& grid, SliceDirection direction);

/// Binary raster (header + row-major float32, NaN = invalid).
std::string elevation_grid_raster(const ElevationGrid& grid);
ElevationGrid elevation_grid_from_raster(const std::string& bytes);

/// Plain-text dump for debugging.
std::string elevation_grid_ascii(const ElevationGrid& grid);

}  // namespace vplate
