#pragma once

#include <optional>
#include <string>

#include "vplate/channel.hpp"
#include "vplate/contours.hpp"

namespace vplate {

enum class SizeClass { ViolinViola, Cello };

inline const char* to_string(SizeClass s) {
  return s == SizeClass::ViolinViola ? "violin_viola" : "cello";
}

/// Colour-scale half-range in mm for a size class (+-28 / +-80).
double colour_range_mm(SizeClass size_class);

/// Level colour sampled from the elevation ramp, "#rrggbb".
std::string level_colour(double z_mm, SizeClass size_class);

/// Top-down plot of the contour stack with the elevation colour bar; the red
/// bracket on the bar spans the plate's exact elevation range. Channel points,
/// when given, are drawn as orange dots above the contours. Output is
/// deterministic byte-for-byte for identical inputs.
std::string render_contours_svg(const ContourSet& contours,
                                const ChannelPointSet* channel,
                                SizeClass size_class);

}  // namespace vplate
