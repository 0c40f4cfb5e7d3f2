#include "vplate/elevation.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>

#include "vplate/errors.hpp"
#include "vplate/parallel.hpp"

namespace vplate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Uniform bucket grid over triangle xy-bounding boxes: O(1) expected
// candidates per sample node on plate-like meshes.
struct TriangleBuckets {
  double cell = 1.0;
  double x0 = 0.0, y0 = 0.0;
  int ncx = 0, ncy = 0;
  std::vector<std::vector<int>> buckets;

  TriangleBuckets(const TriangleMesh& mesh, double xmin, double xmax,
                  double ymin, double ymax) {
    const double area = std::max((xmax - xmin) * (ymax - ymin), 1e-9);
    cell = std::max(1e-6, 2.0 * std::sqrt(area / static_cast<double>(mesh.faces.size())));
    x0 = xmin;
    y0 = ymin;
    ncx = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / cell)) + 1);
    ncy = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / cell)) + 1);
    buckets.resize(static_cast<size_t>(ncx) * ncy);
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
      const auto& face = mesh.faces[f];
      double fx0 = 1e300, fx1 = -1e300, fy0 = 1e300, fy1 = -1e300;
      for (int idx : face) {
        const Vec3& v = mesh.vertices[idx];
        fx0 = std::min(fx0, v.x()); fx1 = std::max(fx1, v.x());
        fy0 = std::min(fy0, v.y()); fy1 = std::max(fy1, v.y());
      }
      int cx0 = clampx(fx0), cx1 = clampx(fx1);
      int cy0 = clampy(fy0), cy1 = clampy(fy1);
      for (int cy = cy0; cy <= cy1; ++cy)
        for (int cx = cx0; cx <= cx1; ++cx)
          buckets[static_cast<size_t>(cy) * ncx + cx].push_back(static_cast<int>(f));
    }
  }

  int clampx(double x) const {
    return std::clamp(static_cast<int>((x - x0) / cell), 0, ncx - 1);
  }
  int clampy(double y) const {
    return std::clamp(static_cast<int>((y - y0) / cell), 0, ncy - 1);
  }

  const std::vector<int>& candidates(double x, double y) const {
    return buckets[static_cast<size_t>(clampy(y)) * ncx + clampx(x)];
  }
};

}  // namespace

ElevationGrid resample_grid(const TriangleMesh& plate, double step,
                            PlateSide side, int jobs) {
  if (!(step > 0.0))
    throw AnalysisError("invalid-argument", "grid step must be positive");
  plate.validate();

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec3& v : plate.vertices) {
    xmin = std::min(xmin, v.x()); xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y()); ymax = std::max(ymax, v.y());
  }

  ElevationGrid grid;
  grid.step = step;
  grid.side = side;
  // Origin snapped to multiples of the step, bounding box padded by one step.
  grid.origin.x() = (std::floor(xmin / step) - 1.0) * step;
  grid.origin.y() = (std::floor(ymin / step) - 1.0) * step;
  grid.nx = static_cast<int>(std::ceil((xmax - grid.origin.x()) / step)) + 2;
  grid.ny = static_cast<int>(std::ceil((ymax - grid.origin.y()) / step)) + 2;
  grid.z.assign(static_cast<size_t>(grid.nx) * grid.ny, kNaN);

  const TriangleBuckets buckets(plate, xmin, xmax, ymin, ymax);

  parallel_for(static_cast<size_t>(grid.ny), jobs, [&](size_t r0, size_t r1) {
    for (size_t row = r0; row < r1; ++row) {
      const double y = grid.y_of(static_cast<int>(row));
      for (int col = 0; col < grid.nx; ++col) {
        const double x = grid.x_of(col);
        double best = kNaN;
        for (int f : buckets.candidates(x, y)) {
          const auto& face = plate.faces[f];
          const Vec3& a = plate.vertices[face[0]];
          const Vec3& b = plate.vertices[face[1]];
          const Vec3& c = plate.vertices[face[2]];
          const double d = (b.x() - a.x()) * (c.y() - a.y()) -
                           (c.x() - a.x()) * (b.y() - a.y());
          if (std::abs(d) < 1e-18) continue;  // vertical or degenerate in xy
          const double l1 = ((x - a.x()) * (c.y() - a.y()) -
                             (c.x() - a.x()) * (y - a.y())) / d;
          const double l2 = ((b.x() - a.x()) * (y - a.y()) -
                             (x - a.x()) * (b.y() - a.y())) / d;
          const double l0 = 1.0 - l1 - l2;
          if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
          const double z = l0 * a.z() + l1 * b.z() + l2 * c.z();
          if (std::isnan(best) || std::abs(z) > std::abs(best)) best = z;
        }
        grid.z[grid.index(static_cast<int>(row), col)] = best;
      }
    }
  });

  if (std::all_of(grid.z.begin(), grid.z.end(), [](double v) { return std::isnan(v); }))
    throw AnalysisError("empty-footprint", "no grid node hits the plate");
  return grid;
}

std::vector<Slice> grid_slices(const ElevationGrid& grid, SliceDirection direction) {
  std::vector<Slice> slices;
  const int nx = grid.nx, ny = grid.ny;
  const double diag = grid.step * std::sqrt(2.0);

  switch (direction) {
    case SliceDirection::Horizontal:
      slices.reserve(ny);
      for (int row = 0; row < ny; ++row) {
        Slice s{direction, {}, grid.step};
        s.nodes.reserve(nx);
        for (int col = 0; col < nx; ++col) s.nodes.push_back(grid.index(row, col));
        slices.push_back(std::move(s));
      }
      break;
    case SliceDirection::Vertical:
      slices.reserve(nx);
      for (int col = 0; col < nx; ++col) {
        Slice s{direction, {}, grid.step};
        s.nodes.reserve(ny);
        for (int row = 0; row < ny; ++row) s.nodes.push_back(grid.index(row, col));
        slices.push_back(std::move(s));
      }
      break;
    case SliceDirection::DiagPlus:
      // constant row - col, from -(nx-1) to ny-1
      slices.reserve(nx + ny - 1);
      for (int d = -(nx - 1); d <= ny - 1; ++d) {
        Slice s{direction, {}, diag};
        for (int row = std::max(0, d); row < ny; ++row) {
          int col = row - d;
          if (col < 0 || col >= nx) break;
          s.nodes.push_back(grid.index(row, col));
        }
        slices.push_back(std::move(s));
      }
      break;
    case SliceDirection::DiagMinus:
      // constant row + col, from 0 to nx+ny-2
      slices.reserve(nx + ny - 1);
      for (int d = 0; d <= nx + ny - 2; ++d) {
        Slice s{direction, {}, diag};
        for (int row = std::max(0, d - (nx - 1)); row <= std::min(ny - 1, d); ++row) {
          s.nodes.push_back(grid.index(row, d - row));
        }
        slices.push_back(std::move(s));
      }
      break;
  }
  return slices;
}

std::string elevation_grid_raster(const ElevationGrid& grid) {
  std::string out;
  out.reserve(64 + grid.z.size() * sizeof(float));
  auto put = [&out](const void* p, size_t n) {
    out.append(static_cast<const char*>(p), n);
  };
  put("EGRD", 4);
  const uint32_t version = 1;
  put(&version, 4);
  const uint8_t side = grid.side == PlateSide::SoundBoard ? 0 : 1;
  put(&side, 1);
  const double ox = grid.origin.x(), oy = grid.origin.y(), step = grid.step;
  put(&ox, 8);
  put(&oy, 8);
  put(&step, 8);
  const uint32_t nx = grid.nx, ny = grid.ny;
  put(&nx, 4);
  put(&ny, 4);
  for (double v : grid.z) {
    const float f = static_cast<float>(v);
    put(&f, 4);
  }
  return out;
}

ElevationGrid elevation_grid_from_raster(const std::string& bytes) {
  size_t pos = 0;
  auto get = [&](void* p, size_t n) {
    if (pos + n > bytes.size())
      throw AnalysisError("parse-error", "truncated elevation raster");
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  };
  char magic[4];
  get(magic, 4);
  if (std::memcmp(magic, "EGRD", 4) != 0)
    throw AnalysisError("parse-error", "bad elevation raster magic");
  uint32_t version = 0;
  get(&version, 4);
  if (version != 1)
    throw AnalysisError("parse-error", "unsupported raster version");
  uint8_t side = 0;
  get(&side, 1);
  ElevationGrid grid;
  grid.side = side == 0 ? PlateSide::SoundBoard : PlateSide::Back;
  double ox, oy;
  get(&ox, 8);
  get(&oy, 8);
  get(&grid.step, 8);
  grid.origin = Vec2(ox, oy);
  uint32_t nx, ny;
  get(&nx, 4);
  get(&ny, 4);
  grid.nx = static_cast<int>(nx);
  grid.ny = static_cast<int>(ny);
  grid.z.resize(static_cast<size_t>(nx) * ny);
  for (double& v : grid.z) {
    float f;
    get(&f, 4);
    v = f;
  }
  return grid;
}

std::string elevation_grid_ascii(const ElevationGrid& grid) {
  std::ostringstream out;
  out << "EGRID-ASCII 1\n";
  out << "side " << to_string(grid.side) << "\n";
  out << "origin " << grid.origin.x() << " " << grid.origin.y() << "\n";
  out << "step " << grid.step << "\n";
  out << "size " << grid.nx << " " << grid.ny << "\n";
  for (int row = 0; row < grid.ny; ++row) {
    for (int col = 0; col < grid.nx; ++col) {
      if (col) out << ' ';
      const double v = grid.z[grid.index(row, col)];
      if (std::isnan(v)) out << "nan";
      else out << v;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace vplate
