#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "support/synthetic.hpp"
#include "vplate/contours.hpp"
#include "vplate/svg.hpp"

using namespace vplate;

namespace {

double total_length(const std::vector<Polyline3>& lines) {
  double sum = 0.0;
  for (const auto& p : lines) sum += p.length();
  return sum;
}

size_t closed_count(const std::vector<Polyline3>& lines) {
  return static_cast<size_t>(
      std::count_if(lines.begin(), lines.end(), [](const Polyline3& p) { return p.closed; }));
}

}  // namespace

TEST_CASE("plane_mesh_intersection on the unit tetrahedron") {
  auto tet = vplate::testing::make_tetrahedron();
  SUBCASE("cut at z = 0.5 is the right isoceles triangle scaled by half") {
    auto lines = plane_mesh_intersection(tet, Plane::horizontal(0.5));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    REQUIRE(lines[0].points.size() == 3);
    // area of the section: 0.5 * 0.5 * 0.5 = 0.125
    CHECK(vplate::testing::polygon_area_xy(lines[0]) == doctest::Approx(0.125).epsilon(1e-12));
    for (const Vec3& p : lines[0].points) CHECK(p.z() == doctest::Approx(0.5).epsilon(1e-12));
    // perimeter: two legs of 0.5 and a hypotenuse 0.5*sqrt(2)
    CHECK(lines[0].length() == doctest::Approx(1.0 + 0.5 * std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("plane below the mesh intersects nothing") {
    CHECK(plane_mesh_intersection(tet, Plane::horizontal(-1.0)).empty());
    CHECK(plane_mesh_intersection(tet, Plane::horizontal(2.0)).empty());
  }
  SUBCASE("plane through the apex vertex only") {
    auto lines = plane_mesh_intersection(tet, Plane::horizontal(1.0));
    double len = total_length(lines);
    CHECK(len < 1e-12);
  }
  SUBCASE("plane containing the base face yields its edges") {
    auto lines = plane_mesh_intersection(tet, Plane::horizontal(0.0));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    CHECK(lines[0].length() == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("oblique plane x = 0.25") {
    auto lines = plane_mesh_intersection(tet, Plane{Vec3::UnitX(), 0.25});
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    // triangle with vertices (0.25,0,0) (0.25,0.75,0) (0.25,0,0.75)
    CHECK(lines[0].length() == doctest::Approx(1.5 + 0.75 * std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("plane_mesh_intersection on an icosphere matches the circle oracle") {
  const double r = 10.0;
  auto sphere = vplate::testing::make_icosphere(r, 4);
  for (double h : {0.0, 2.5, -6.0, 9.0}) {
    auto lines = plane_mesh_intersection(sphere, Plane::horizontal(h));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    const double expected = 2.0 * std::acos(-1.0) * std::sqrt(r * r - h * h);
    // the faceted sphere's section is a polygon slightly inside the circle
    CHECK(total_length(lines) == doctest::Approx(expected).epsilon(0.01));
    // every section point lies near the sphere and exactly on the plane
    for (const Vec3& p : lines[0].points) {
      CHECK(p.z() == doctest::Approx(h).epsilon(1e-9));
      CHECK(p.norm() == doctest::Approx(r).epsilon(0.01));
    }
  }
}

TEST_CASE("segment chaining conserves endpoints") {
  // every chained polyline's consecutive points must coincide with shared
  // triangle-edge crossings; check via re-intersection invariants
  auto sphere = vplate::testing::make_icosphere(7.0, 3);
  auto lines = plane_mesh_intersection(sphere, Plane::horizontal(1.3));
  REQUIRE(lines.size() == 1);
  const auto& pts = lines[0].points;
  REQUIRE(pts.size() > 10);
  std::set<std::pair<long long, long long>> seen;
  for (const Vec3& p : pts) {
    auto key = std::make_pair(llround(p.x() * 1e6), llround(p.y() * 1e6));
    CHECK(seen.insert(key).second);  // no repeated vertices in a closed loop
  }
}

TEST_CASE("contour_lines levels and range") {
  SUBCASE("arched rect plate") {
    // z = 5 - (x/10)^2, x in [-20, 20]: z range [1, 5]
    auto plate = vplate::testing::make_rect_plate(
        40, 20, 81, 41, [](double x, double) { return 5.0 - (x / 10.0) * (x / 10.0); });
    auto set = contour_lines(plate, 1.0, "p1", PlateSide::SoundBoard);
    CHECK(set.plate_id == "p1");
    CHECK(set.z_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(set.z_max == doctest::Approx(5.0).epsilon(1e-12));
    REQUIRE(set.levels.size() == 5);
    for (int i = 0; i < 5; ++i)
      CHECK(set.levels[i].z_level == doctest::Approx(1.0 + i).epsilon(1e-12));
    // interior levels cut the surface in two open lines (x = +-const)
    for (int i = 1; i < 4; ++i) {
      const auto& level = set.levels[i];
      CHECK(level.polylines.size() == 2);
      const double x_expect = 10.0 * std::sqrt(5.0 - level.z_level);
      // the mesh interpolates the parabola piecewise-linearly; allow the
      // corresponding chord error
      for (const auto& line : level.polylines)
        for (const Vec3& p : line.points)
          CHECK(std::abs(std::abs(p.x()) - x_expect) < 0.01);
    }
  }
  SUBCASE("spacing 2 levels are a subset of spacing 1 levels") {
    auto plate = vplate::testing::make_rect_plate(
        40, 40, 41, 41, [](double x, double y) { return 7.0 - 0.005 * (x * x + y * y); });
    auto fine = contour_lines(plate, 1.0);
    auto coarse = contour_lines(plate, 2.0);
    std::set<double> fine_levels;
    for (const auto& l : fine.levels) fine_levels.insert(l.z_level);
    for (const auto& l : coarse.levels) {
      CHECK(fine_levels.count(l.z_level) == 1);
      CHECK(std::abs(std::remainder(l.z_level, 2.0)) < 1e-9);
    }
  }
  SUBCASE("levels are multiples of spacing, not offsets from z_min") {
    auto plate = vplate::testing::make_rect_plate(
        10, 10, 11, 11, [](double x, double) { return 2.3 + 0.1 * x; });
    auto set = contour_lines(plate, 1.0);
    // z range is [1.8, 2.8]; only level 2 fits
    REQUIRE(set.levels.size() == 1);
    CHECK(set.levels[0].z_level == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("xy translation leaves levels unchanged and shifts geometry") {
    auto plate = vplate::testing::make_rect_plate(
        30, 30, 31, 31, [](double x, double y) { return 4.0 - 0.01 * (x * x + y * y); });
    auto moved = plate;
    for (Vec3& v : moved.vertices) v += Vec3(13.0, -8.0, 0.0);
    auto a = contour_lines(plate, 1.0);
    auto b = contour_lines(moved, 1.0);
    REQUIRE(a.levels.size() == b.levels.size());
    for (size_t i = 0; i < a.levels.size(); ++i) {
      CHECK(a.levels[i].z_level == b.levels[i].z_level);
      CHECK(total_length(a.levels[i].polylines) ==
            doctest::Approx(total_length(b.levels[i].polylines)).epsilon(1e-9));
    }
  }
}

TEST_CASE("contour_lines on a hemispherical cap: circumference oracle") {
  const double r = 40.0;
  auto cap = vplate::testing::make_icosphere_cap(r, 4, 0.5);
  auto set = contour_lines(cap, 1.0, "cap");
  CHECK(set.z_max == doctest::Approx(r).epsilon(0.01));
  REQUIRE(set.levels.size() >= 35);
  const double pi = std::acos(-1.0);
  for (const auto& level : set.levels) {
    if (level.z_level > r - 2.0) continue;  // pole region is too faceted
    if (level.z_level < 5.0) continue;      // ragged cut rim below
    CHECK(closed_count(level.polylines) == level.polylines.size());
    const double expected = 2.0 * pi * std::sqrt(r * r - level.z_level * level.z_level);
    CHECK(total_length(level.polylines) == doctest::Approx(expected).epsilon(0.01));
  }
}

TEST_CASE("contour points lie on the mesh surface") {
  auto plate = vplate::testing::make_elliptic_plate(
      60, 40, 2.0, [](double x, double y) {
        return 8.0 * std::exp(-(x * x / 1800.0 + y * y / 800.0)) + 1.0;
      });
  vplate::testing::MeshDistanceIndex index(plate);
  auto set = contour_lines(plate, 1.0);
  size_t checked = 0;
  for (const auto& level : set.levels)
    for (const auto& line : level.polylines)
      for (size_t i = 0; i < line.points.size(); i += 5) {
        CHECK(index.distance(line.points[i]) < 1e-9);
        ++checked;
      }
  CHECK(checked > 50);
}

TEST_CASE("contour_set_csv shape") {
  auto plate = vplate::testing::make_rect_plate(
      20, 10, 21, 11, [](double x, double) { return 3.0 - 0.01 * x * x; });
  auto set = contour_lines(plate, 1.0, "0233");
  const std::string csv = contour_set_csv(set);
  CHECK(csv.rfind("plate_id,level_mm,polyline_index,point_index,x,y,z\n", 0) == 0);
  CHECK(csv.find("0233,") != std::string::npos);
  // deterministic
  CHECK(csv == contour_set_csv(set));
}

TEST_CASE("render_contours_svg") {
  auto plate = vplate::testing::make_elliptic_plate(
      100, 60, 2.0, [](double x, double y) {
        return 12.0 * (1.0 - (x * x / 10000.0 + y * y / 3600.0)) + 1.0;
      });
  auto set = contour_lines(plate, 1.0, "2795");
  SUBCASE("structure and determinism") {
    const std::string svg = render_contours_svg(set, {}, SizeClass::ViolinViola);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg == render_contours_svg(set, {}, SizeClass::ViolinViola));
    // one path per polyline
    size_t polylines = 0, paths = 0;
    for (const auto& level : set.levels) polylines += level.polylines.size();
    for (size_t pos = svg.find("<path"); pos != std::string::npos;
         pos = svg.find("<path", pos + 1))
      ++paths;
    CHECK(paths >= polylines);
  }
  SUBCASE("channel markers are drawn in orange") {
    ChannelPointSet channel;
    channel.points.push_back({0, 0, 10.0, 5.0, 1.5, 0b0011});
    const std::string svg = render_contours_svg(set, &channel, SizeClass::ViolinViola);
    CHECK(svg.find("#ff8c00") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
  }
  SUBCASE("colour range and clamping note") {
    CHECK(colour_range_mm(SizeClass::ViolinViola) == 28.0);
    CHECK(colour_range_mm(SizeClass::Cello) == 80.0);
    // elevations above the violin range trigger the clamp note
    auto tall = vplate::testing::make_rect_plate(
        20, 20, 11, 11, [](double x, double) { return 30.0 + 0.1 * x; });
    auto tall_set = contour_lines(tall, 1.0, "tall");
    const std::string svg = render_contours_svg(tall_set, {}, SizeClass::ViolinViola);
    CHECK(svg.find("clamped") != std::string::npos);
    const std::string cello = render_contours_svg(tall_set, {}, SizeClass::Cello);
    CHECK(cello.find("clamped") == std::string::npos);
  }
  SUBCASE("level colours are distinct and in range") {
    std::set<std::string> colours;
    for (const auto& level : set.levels)
      colours.insert(level_colour(level.z_level, SizeClass::ViolinViola));
    CHECK(colours.size() == set.levels.size());
    for (const auto& c : colours) {
      CHECK(c.size() == 7);
      CHECK(c[0] == '#');
    }
  }
}
