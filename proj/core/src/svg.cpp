#include "vplate/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace vplate {

namespace {

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

struct Rgb {
  double r, g, b;
};

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

// Elevation ramp: blue -> green -> yellow over [0, 1] of |z| / range.
// The single place where the plot colours are fixed.
Rgb ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const Rgb blue{40, 60, 220}, green{30, 200, 80}, yellow{250, 230, 40};
  return t < 0.5 ? lerp(blue, green, t * 2.0) : lerp(green, yellow, (t - 0.5) * 2.0);
}

std::string hex_of(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(c.r + 0.5),
                static_cast<int>(c.g + 0.5), static_cast<int>(c.b + 0.5));
  return buf;
}

}  // namespace

double colour_range_mm(SizeClass size_class) {
  return size_class == SizeClass::ViolinViola ? 28.0 : 80.0;
}

std::string level_colour(double z_mm, SizeClass size_class) {
  return hex_of(ramp(std::abs(z_mm) / colour_range_mm(size_class)));
}

std::string render_contours_svg(const ContourSet& contours,
                                const ChannelPointSet* channel,
                                SizeClass size_class) {
  const double range = colour_range_mm(size_class);

  // Plot bounds from the geometry; fall back to a fixed frame when empty.
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto grow = [&](double x, double y) {
    xmin = std::min(xmin, x); xmax = std::max(xmax, x);
    ymin = std::min(ymin, y); ymax = std::max(ymax, y);
  };
  for (const auto& level : contours.levels)
    for (const auto& line : level.polylines)
      for (const Vec3& p : line.points) grow(p.x(), p.y());
  if (channel)
    for (const ChannelPoint& p : channel->points) grow(p.x, p.y);
  if (!(xmin < xmax)) { xmin = ymin = -100.0; xmax = ymax = 100.0; }

  const double margin = 20.0;
  const double bar_w = 18.0, bar_gap = 30.0, label_w = 50.0;
  const double plot_w = xmax - xmin, plot_h = ymax - ymin;
  const double width = margin * 2 + plot_w + bar_gap + bar_w + label_w;
  const double height = margin * 2 + std::max(plot_h, 120.0);
  const double bar_h = height - 2 * margin;
  const double bar_x = margin + plot_w + bar_gap;

  auto sx = [&](double x) { return margin + (x - xmin); };
  auto sy = [&](double y) { return height - margin - (y - ymin); };  // y up
  // elevation -> vertical position on the colour bar (+range at top)
  auto bar_y = [&](double z) {
    return margin + (range - z) / (2.0 * range) * bar_h;
  };

  std::vector<double> clamped_levels;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
      << " " << fmt(height) << "\">\n";
  svg << "<title>" << contours.plate_id << " " << to_string(contours.side)
      << " contours</title>\n";

  // frame
  svg << "<rect x=\"" << fmt(margin) << "\" y=\"" << fmt(margin) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(height - 2 * margin)
      << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";

  // contour polylines, level order then polyline order
  for (const auto& level : contours.levels) {
    double z = level.z_level;
    if (std::abs(z) > range) {
      clamped_levels.push_back(z);
      z = std::clamp(z, -range, range);
    }
    const std::string colour = level_colour(z, size_class);
    for (const auto& line : level.polylines) {
      svg << "<path d=\"";
      for (size_t i = 0; i < line.points.size(); ++i) {
        svg << (i == 0 ? "M" : " L") << fmt(sx(line.points[i].x())) << ","
            << fmt(sy(line.points[i].y()));
      }
      if (line.closed) svg << " Z";
      svg << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"0.5\"/>\n";
    }
  }

  // channel of minima above the contours
  if (channel) {
    for (const ChannelPoint& p : channel->points) {
      svg << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y))
          << "\" r=\"0.6\" fill=\"#ff8c00\"/>\n";
    }
  }

  // colour bar: discrete cells over [-range, +range]
  const int cells = 112;
  for (int i = 0; i < cells; ++i) {
    const double z_top = range - (2.0 * range) * i / cells;
    const double z_mid = z_top - range / cells;
    svg << "<rect x=\"" << fmt(bar_x) << "\" y=\"" << fmt(bar_y(z_top))
        << "\" width=\"" << fmt(bar_w) << "\" height=\"" << fmt(bar_h / cells + 0.1)
        << "\" fill=\"" << level_colour(z_mid, size_class) << "\" stroke=\"none\"/>\n";
  }
  svg << "<rect x=\"" << fmt(bar_x) << "\" y=\"" << fmt(margin) << "\" width=\""
      << fmt(bar_w) << "\" height=\"" << fmt(bar_h)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>\n";

  // red bracket: exact elevation range of the plate
  const double zr0 = std::clamp(contours.z_min, -range, range);
  const double zr1 = std::clamp(contours.z_max, -range, range);
  svg << "<path d=\"M" << fmt(bar_x + bar_w + 6) << "," << fmt(bar_y(zr1)) << " L"
      << fmt(bar_x + bar_w + 2) << "," << fmt(bar_y(zr1)) << " L"
      << fmt(bar_x + bar_w + 2) << "," << fmt(bar_y(zr0)) << " L"
      << fmt(bar_x + bar_w + 6) << "," << fmt(bar_y(zr0))
      << "\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n";

  // bar labels
  for (double z : {range, 0.0, -range}) {
    svg << "<text x=\"" << fmt(bar_x + bar_w + 10) << "\" y=\"" << fmt(bar_y(z) + 3)
        << "\" font-size=\"9\">" << fmt(z, 0) << " mm</text>\n";
  }

  if (!clamped_levels.empty()) {
    svg << "<metadata>clamped-levels:";
    for (double z : clamped_levels) svg << " " << fmt(z);
    svg << "</metadata>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vplate
