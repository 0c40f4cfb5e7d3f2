#include "vplate/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vplate/errors.hpp"

namespace vplate {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void AnalysisConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0))
      throw AnalysisError("invalid-config", std::string(what) + " must be positive");
  };
  positive(contour_spacing_mm, "contour_spacing_mm");
  positive(grid_step_mm, "grid_step_mm");
  positive(histogram_bin_deg, "histogram_bin_deg");
  for (const ChannelParams* p : {&channel_violin_viola, &channel_cello}) {
    positive(p->neighbourhood_radius_mm, "neighbourhood_radius_mm");
    if (p->min_votes < 1 || p->min_votes > 4)
      throw AnalysisError("invalid-config", "min_votes must be in [1, 4]");
    const double h = p->arching_filter.max_relative_height;
    if (!(h > 0.0 && h <= 1.0))
      throw AnalysisError("invalid-config", "max_relative_height must be in (0, 1]");
    if (p->arching_filter.boundary_band_mm)
      positive(*p->arching_filter.boundary_band_mm, "boundary_band_mm");
  }
}

AnalysisConfig parse_config(const std::string& text) {
  AnalysisConfig config;
  std::istringstream in(text);
  std::string line, section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw AnalysisError("invalid-config",
                          "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto as_double = [&]() {
      try {
        return std::stod(value);
      } catch (...) {
        throw AnalysisError("invalid-config", "bad number for " + key);
      }
    };

    if (section.empty()) {
      if (key == "contour_spacing_mm") config.contour_spacing_mm = as_double();
      else if (key == "grid_step_mm") config.grid_step_mm = as_double();
      else if (key == "histogram_bin_deg") config.histogram_bin_deg = as_double();
      else if (key == "output_dir") config.output_dir = value;
      else if (key == "emit") config.emit = parse_emit_flags(value);
      else if (key == "jobs") config.jobs = static_cast<int>(as_double());
      else throw AnalysisError("invalid-config", "unknown key '" + key + "'");
    } else if (section == "channel.violin_viola" || section == "channel.cello") {
      ChannelParams& p = section == "channel.violin_viola"
                             ? config.channel_violin_viola
                             : config.channel_cello;
      if (key == "neighbourhood_radius_mm") p.neighbourhood_radius_mm = as_double();
      else if (key == "min_votes") p.min_votes = static_cast<int>(as_double());
      else if (key == "max_relative_height")
        p.arching_filter.max_relative_height = as_double();
      else if (key == "boundary_band_mm")
        p.arching_filter.boundary_band_mm = as_double();
      else throw AnalysisError("invalid-config", "unknown key '" + key + "'");
    } else {
      throw AnalysisError("invalid-config", "unknown section '" + section + "'");
    }
  }
  config.validate();
  return config;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AnalysisError("io-error", "cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_text(const AnalysisConfig& config) {
  std::ostringstream out;
  out << "contour_spacing_mm = " << fmt(config.contour_spacing_mm) << "\n";
  out << "grid_step_mm = " << fmt(config.grid_step_mm) << "\n";
  out << "histogram_bin_deg = " << fmt(config.histogram_bin_deg) << "\n";
  out << "output_dir = " << config.output_dir << "\n";
  out << "emit = ";
  bool first = true;
  auto flag = [&](bool on, const char* name) {
    if (!on) return;
    if (!first) out << ",";
    out << name;
    first = false;
  };
  flag(config.emit.svg, "svg");
  flag(config.emit.csv, "csv");
  flag(config.emit.json, "json");
  flag(config.emit.raster, "raster");
  out << "\n";
  out << "jobs = " << config.jobs << "\n";
  for (const auto& [name, p] :
       {std::pair<const char*, const ChannelParams&>{"violin_viola",
                                                     config.channel_violin_viola},
        {"cello", config.channel_cello}}) {
    out << "\n[channel." << name << "]\n";
    out << "neighbourhood_radius_mm = " << fmt(p.neighbourhood_radius_mm) << "\n";
    out << "min_votes = " << p.min_votes << "\n";
    out << "max_relative_height = " << fmt(p.arching_filter.max_relative_height) << "\n";
    if (p.arching_filter.boundary_band_mm)
      out << "boundary_band_mm = " << fmt(*p.arching_filter.boundary_band_mm) << "\n";
  }
  return out.str();
}

EmitFlags parse_emit_flags(const std::string& csv_list) {
  EmitFlags flags{false, false, false, false};
  std::istringstream ss(csv_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "svg") flags.svg = true;
    else if (item == "csv") flags.csv = true;
    else if (item == "json") flags.json = true;
    else if (item == "raster") flags.raster = true;
    else if (!item.empty())
      throw AnalysisError("invalid-config", "unknown emit flag '" + item + "'");
  }
  return flags;
}

}  // namespace vplate
