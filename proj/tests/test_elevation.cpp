#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "support/synthetic.hpp"
#include "vplate/elevation.hpp"
#include "vplate/errors.hpp"

using namespace vplate;

namespace {

size_t valid_count(const ElevationGrid& g) {
  size_t n = 0;
  for (double v : g.z)
    if (!std::isnan(v)) ++n;
  return n;
}

ElevationGrid make_grid_3x3() {
  ElevationGrid g;
  g.origin = Vec2(0.0, 0.0);
  g.step = 1.0;
  g.nx = 3;
  g.ny = 3;
  g.z.assign(9, 0.0);
  return g;
}

}  // namespace

TEST_CASE("resample_grid reproduces a flat plate exactly") {
  auto plate = vplate::testing::make_rect_plate(20, 10, 21, 11,
                                                [](double, double) { return 4.0; });
  auto grid = resample_grid(plate, 0.25);
  CHECK(grid.step == 0.25);
  // origin snapped to multiples of the step
  CHECK(std::abs(std::remainder(grid.origin.x(), 0.25)) < 1e-12);
  CHECK(std::abs(std::remainder(grid.origin.y(), 0.25)) < 1e-12);
  size_t hits = 0;
  for (int row = 0; row < grid.ny; ++row)
    for (int col = 0; col < grid.nx; ++col)
      if (grid.valid(row, col)) {
        CHECK(grid.z[grid.index(row, col)] == doctest::Approx(4.0).epsilon(1e-12));
        ++hits;
      }
  // 81 x 41 interior nodes must all be valid
  CHECK(hits >= 81u * 41u);
}

TEST_CASE("resample_grid reproduces a tilted plane exactly at the nodes") {
  auto plate = vplate::testing::make_rect_plate(
      40, 30, 41, 31, [](double x, double y) { return 1.0 + 0.05 * x - 0.02 * y; });
  auto grid = resample_grid(plate, 0.5);
  size_t checked = 0;
  for (int row = 0; row < grid.ny; ++row)
    for (int col = 0; col < grid.nx; ++col)
      if (grid.valid(row, col)) {
        const double expect = 1.0 + 0.05 * grid.x_of(col) - 0.02 * grid.y_of(row);
        CHECK(grid.z[grid.index(row, col)] == doctest::Approx(expect).epsilon(1e-9));
        ++checked;
      }
  CHECK(checked > 1000);
}

TEST_CASE("resample_grid footprint matches the ellipse") {
  const double a = 30.0, b = 20.0;
  auto plate = vplate::testing::make_elliptic_plate(a, b, 1.0,
                                                    [](double, double) { return 1.0; });
  auto grid = resample_grid(plate, 0.5);
  for (int row = 0; row < grid.ny; ++row)
    for (int col = 0; col < grid.nx; ++col) {
      const double x = grid.x_of(col), y = grid.y_of(row);
      const double rho2 = x * x / (a * a) + y * y / (b * b);
      if (grid.valid(row, col)) {
        CHECK(rho2 < 1.05);  // inside or very near the triangulated rim
      } else if (rho2 < 0.9) {
        FAIL_CHECK("interior node (", x, ", ", y, ") missing");
      }
    }
  // area check: valid nodes * step^2 close to pi*a*b
  const double pi = std::acos(-1.0);
  CHECK(static_cast<double>(valid_count(grid)) * 0.25 ==
        doctest::Approx(pi * a * b).epsilon(0.05));
}

TEST_CASE("fold-over picks the outer surface (max |z|)") {
  // two stacked sheets over the same footprint: z = 2 and z = 5
  auto lower = vplate::testing::make_rect_plate(10, 10, 11, 11,
                                                [](double, double) { return 2.0; });
  auto upper = vplate::testing::make_rect_plate(10, 10, 11, 11,
                                                [](double, double) { return 5.0; });
  TriangleMesh both = lower;
  const int base = static_cast<int>(both.vertices.size());
  both.vertices.insert(both.vertices.end(), upper.vertices.begin(), upper.vertices.end());
  for (auto f : upper.faces) both.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  auto grid = resample_grid(both, 1.0);
  for (int row = 0; row < grid.ny; ++row)
    for (int col = 0; col < grid.nx; ++col)
      if (grid.valid(row, col))
        CHECK(grid.z[grid.index(row, col)] == doctest::Approx(5.0).epsilon(1e-12));

  // mirror below the plane: z = -5 beats z = 2 on |z|
  TriangleMesh deep = lower;
  auto under = vplate::testing::make_rect_plate(10, 10, 11, 11,
                                                [](double, double) { return -5.0; });
  const int base2 = static_cast<int>(deep.vertices.size());
  deep.vertices.insert(deep.vertices.end(), under.vertices.begin(), under.vertices.end());
  for (auto f : under.faces) deep.faces.push_back({f[0] + base2, f[1] + base2, f[2] + base2});
  auto grid2 = resample_grid(deep, 1.0);
  for (int row = 0; row < grid2.ny; ++row)
    for (int col = 0; col < grid2.nx; ++col)
      if (grid2.valid(row, col))
        CHECK(grid2.z[grid2.index(row, col)] == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("resample_grid errors") {
  TriangleMesh far_away;
  far_away.vertices = {{0, 0, 0}, {0.01, 0, 0}, {0, 0.01, 0}};
  far_away.faces = {{0, 1, 2}};
  // plate smaller than one grid cell placed between nodes
  for (Vec3& v : far_away.vertices) v += Vec3(0.37, 0.37, 0.0);
  CHECK_THROWS_WITH_AS(resample_grid(far_away, 1.0),
                       doctest::Contains("empty-footprint"), AnalysisError);
}

TEST_CASE("steps s and s/2 agree at shared nodes") {
  auto plate = vplate::testing::make_elliptic_plate(
      25, 15, 1.0, [](double x, double y) {
        return 5.0 * std::exp(-(x * x + 2 * y * y) / 300.0) + 0.5;
      });
  auto coarse = resample_grid(plate, 1.0);
  auto fine = resample_grid(plate, 0.5);
  size_t compared = 0;
  for (int row = 0; row < coarse.ny; ++row)
    for (int col = 0; col < coarse.nx; ++col) {
      if (!coarse.valid(row, col)) continue;
      const double x = coarse.x_of(col), y = coarse.y_of(row);
      const int fcol = static_cast<int>(std::lround((x - fine.origin.x()) / fine.step));
      const int frow = static_cast<int>(std::lround((y - fine.origin.y()) / fine.step));
      REQUIRE(fcol >= 0);
      REQUIRE(frow >= 0);
      REQUIRE(fcol < fine.nx);
      REQUIRE(frow < fine.ny);
      REQUIRE(fine.valid(frow, fcol));
      CHECK(fine.z[fine.index(frow, fcol)] ==
            doctest::Approx(coarse.z[coarse.index(row, col)]).epsilon(1e-12));
      ++compared;
    }
  CHECK(compared > 500);
}

TEST_CASE("resample_grid is independent of the job count") {
  auto plate = vplate::testing::make_elliptic_plate(
      30, 20, 1.0, [](double x, double y) { return 3.0 + 0.01 * x * y; });
  auto a = resample_grid(plate, 0.5, PlateSide::SoundBoard, 1);
  auto b = resample_grid(plate, 0.5, PlateSide::SoundBoard, 4);
  CHECK(a.nx == b.nx);
  CHECK(a.ny == b.ny);
  CHECK(elevation_grid_raster(a) == elevation_grid_raster(b));
}

TEST_CASE("grid_slices on a 3x3 grid") {
  auto g = make_grid_3x3();
  SUBCASE("horizontal: 3 rows of 3, spacing = step") {
    auto slices = grid_slices(g, SliceDirection::Horizontal);
    REQUIRE(slices.size() == 3);
    for (const auto& s : slices) {
      CHECK(s.nodes.size() == 3);
      CHECK(s.node_spacing == doctest::Approx(1.0));
      CHECK(s.direction == SliceDirection::Horizontal);
    }
    // first row is nodes 0,1,2 in order
    CHECK(slices[0].nodes == std::vector<size_t>{0, 1, 2});
  }
  SUBCASE("vertical: 3 columns of 3") {
    auto slices = grid_slices(g, SliceDirection::Vertical);
    REQUIRE(slices.size() == 3);
    for (const auto& s : slices) CHECK(s.nodes.size() == 3);
    CHECK(slices[0].nodes == std::vector<size_t>{0, 3, 6});
  }
  SUBCASE("diagonals: lengths 1,2,3,2,1 and spacing step*sqrt(2)") {
    for (auto dir : {SliceDirection::DiagPlus, SliceDirection::DiagMinus}) {
      auto slices = grid_slices(g, dir);
      REQUIRE(slices.size() == 5);
      std::multiset<size_t> lengths;
      for (const auto& s : slices) {
        lengths.insert(s.nodes.size());
        CHECK(s.node_spacing == doctest::Approx(std::sqrt(2.0)));
      }
      CHECK(lengths == std::multiset<size_t>{1, 1, 2, 2, 3});
    }
  }
  SUBCASE("every node appears in exactly one slice per direction") {
    for (auto dir : {SliceDirection::Horizontal, SliceDirection::Vertical,
                     SliceDirection::DiagPlus, SliceDirection::DiagMinus}) {
      auto slices = grid_slices(g, dir);
      std::map<size_t, int> seen;
      for (const auto& s : slices)
        for (size_t n : s.nodes) seen[n]++;
      CHECK(seen.size() == 9);
      for (const auto& [node, count] : seen) CHECK(count == 1);
    }
  }
  SUBCASE("membership over all four directions is exactly 4 per node") {
    std::map<size_t, int> seen;
    for (auto dir : {SliceDirection::Horizontal, SliceDirection::Vertical,
                     SliceDirection::DiagPlus, SliceDirection::DiagMinus})
      for (const auto& s : grid_slices(g, dir))
        for (size_t n : s.nodes) seen[n]++;
    for (const auto& [node, count] : seen) CHECK(count == 4);
  }
  SUBCASE("diagonal neighbours differ by one row and one column") {
    auto check_dir = [&](SliceDirection dir, int dcol) {
      for (const auto& s : grid_slices(g, dir))
        for (size_t i = 1; i < s.nodes.size(); ++i) {
          const int r0 = static_cast<int>(s.nodes[i - 1]) / g.nx;
          const int c0 = static_cast<int>(s.nodes[i - 1]) % g.nx;
          const int r1 = static_cast<int>(s.nodes[i]) / g.nx;
          const int c1 = static_cast<int>(s.nodes[i]) % g.nx;
          CHECK(r1 - r0 == 1);
          CHECK(c1 - c0 == dcol);
        }
    };
    check_dir(SliceDirection::DiagPlus, 1);
    check_dir(SliceDirection::DiagMinus, -1);
  }
}

TEST_CASE("elevation grid raster round trip") {
  auto plate = vplate::testing::make_elliptic_plate(
      20, 12, 1.0, [](double x, double y) { return 2.0 + 0.1 * x - 0.03 * y; });
  auto grid = resample_grid(plate, 0.5, PlateSide::Back);
  const std::string bytes = elevation_grid_raster(grid);
  CHECK(bytes.rfind("EGRD", 0) == 0);
  auto back = elevation_grid_from_raster(bytes);
  CHECK(back.nx == grid.nx);
  CHECK(back.ny == grid.ny);
  CHECK(back.step == doctest::Approx(grid.step));
  CHECK(back.side == PlateSide::Back);
  CHECK((back.origin - grid.origin).norm() < 1e-6);
  REQUIRE(back.z.size() == grid.z.size());
  for (size_t i = 0; i < grid.z.size(); ++i) {
    if (std::isnan(grid.z[i])) {
      CHECK(std::isnan(back.z[i]));
    } else {
      CHECK(back.z[i] == doctest::Approx(grid.z[i]).epsilon(1e-6));
    }
  }
  // byte determinism
  CHECK(elevation_grid_raster(grid) == bytes);
}

TEST_CASE("elevation_grid_ascii mentions the dimensions") {
  auto g = make_grid_3x3();
  const std::string text = elevation_grid_ascii(g);
  CHECK(text.find("size 3 3") != std::string::npos);
}
