#pragma once

#include <string>

#include "vplate/channel.hpp"
#include "vplate/svg.hpp"

namespace vplate {

struct EmitFlags {
  bool svg = true;
  bool csv = true;
  bool json = true;
  bool raster = false;
};

/// Every analysis constant in one place, with the defaults used throughout:
/// contours every 1 mm, grid step 0.25 mm, neighbourhood radii 2 mm / 5 mm,
/// vote threshold 2, histogram bins of 0.05 deg, colour ranges +-28 / +-80 mm.
struct AnalysisConfig {
  double contour_spacing_mm = 1.0;
  double grid_step_mm = 0.25;
  double histogram_bin_deg = 0.05;
  ChannelParams channel_violin_viola{2.0, 2, {0.3, std::nullopt}};
  ChannelParams channel_cello{5.0, 2, {0.3, std::nullopt}};
  std::string output_dir = "out";
  EmitFlags emit;
  int jobs = 0;  // 0 = hardware concurrency

  const ChannelParams& channel_params(SizeClass size_class) const {
    return size_class == SizeClass::ViolinViola ? channel_violin_viola
                                                : channel_cello;
  }

  void validate() const;  // throws "invalid-config"
};

/// Flat key-value text with [channel.<size_class>] sections.
AnalysisConfig load_config(const std::string& path);
AnalysisConfig parse_config(const std::string& text);
std::string config_text(const AnalysisConfig& config);

EmitFlags parse_emit_flags(const std::string& csv_list);  // "svg,csv,json,raster"

}  // namespace vplate
