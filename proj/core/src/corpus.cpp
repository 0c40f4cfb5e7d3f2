#include "vplate/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "vplate/errors.hpp"
#include "vplate/mesh_io.hpp"
#include "vplate/parallel.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace vplate {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
        else quoted = false;
      } else cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AnalysisError("io-error", "cannot write " + path.string());
  out << content;
}

SizeClass default_size_class(InstrumentSize size) {
  switch (size) {
    case InstrumentSize::Cello:
    case InstrumentSize::BassViolin:
      return SizeClass::Cello;
    default:
      return SizeClass::ViolinViola;
  }
}

Vec2 parse_neck_direction(std::string text) {
  std::replace(text.begin(), text.end(), ';', ' ');
  std::istringstream ss(text);
  double x, y;
  if (!(ss >> x >> y))
    throw AnalysisError("invalid-neck", "cannot parse neck_direction '" + text + "'");
  Vec2 v(x, y);
  if (v.norm() < 1e-12)
    throw AnalysisError("invalid-neck", "zero neck_direction");
  return v.normalized();
}

struct StageTimer {
  InstrumentReport& report;
  std::string stage;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  StageTimer(InstrumentReport& r, std::string s) : report(r), stage(std::move(s)) {}
  ~StageTimer() {
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start).count();
    report.stage_seconds.emplace_back(stage, secs);
  }
};

/// Datum for an instrument with a single surviving plate: its own contour
/// plane rotated and merged with z = 0, plate oriented by side.
TriangleMesh align_single_plate(const TriangleMesh& plate, PlateSide side) {
  auto loops = boundary_loops(plate);
  if (loops.empty())
    throw AnalysisError("no-boundary", "plate mesh has no boundary loop");
  auto [plane, res] = fit_plane_orthogonal(loops.front().points);
  (void)res;

  RigidTransform t;
  const Vec3 n = plane.normal;
  const Vec3 axis = n.cross(Vec3::UnitZ());
  const double s = axis.norm();
  if (s > 1e-15)
    t.rotation = Eigen::AngleAxisd(std::atan2(s, n.z()), axis / s).toRotationMatrix();
  t.translation = Vec3(0, 0, -plane.offset);

  TriangleMesh out = apply_rigid_transform(plate, t);
  double mean_z = 0.0;
  for (const Vec3& v : out.vertices) mean_z += v.z();
  mean_z /= static_cast<double>(out.vertices.size());
  const bool want_positive = side == PlateSide::SoundBoard;
  if ((mean_z > 0.0) != want_positive) {
    RigidTransform flip;
    flip.rotation = Eigen::AngleAxisd(EIGEN_PI, Vec3::UnitX()).toRotationMatrix();
    out = apply_rigid_transform(out, flip);
  }
  return out;
}

ordered_json channel_params_json(const ChannelParams& p) {
  ordered_json j;
  j["neighbourhood_radius_mm"] = p.neighbourhood_radius_mm;
  j["min_votes"] = p.min_votes;
  j["max_relative_height"] = p.arching_filter.max_relative_height;
  if (p.arching_filter.boundary_band_mm)
    j["boundary_band_mm"] = *p.arching_filter.boundary_band_mm;
  else
    j["boundary_band_mm"] = nullptr;
  return j;
}

ordered_json config_json(const AnalysisConfig& config) {
  ordered_json j;
  j["contour_spacing_mm"] = config.contour_spacing_mm;
  j["grid_step_mm"] = config.grid_step_mm;
  j["histogram_bin_deg"] = config.histogram_bin_deg;
  j["channel"]["violin_viola"] = channel_params_json(config.channel_violin_viola);
  j["channel"]["cello"] = channel_params_json(config.channel_cello);
  // The relative-height rule of the arching filter is an artifact choice, not
  // a published constant; flag it so reports stay comparable.
  j["arching_filter_note"] =
      "relative-height threshold is an artifact parameter, not a corpus constant";
  return j;
}

const char* status_string(InstrumentStatus s) {
  switch (s) {
    case InstrumentStatus::Ok: return "ok";
    case InstrumentStatus::MissingPlate: return "missing_plate";
    default: return "failed";
  }
}

}  // namespace

InstrumentSize instrument_size_from_string(const std::string& s) {
  if (s == "violin") return InstrumentSize::Violin;
  if (s == "viola") return InstrumentSize::Viola;
  if (s == "tenor_violin") return InstrumentSize::TenorViolin;
  if (s == "cello") return InstrumentSize::Cello;
  if (s == "bass_violin") return InstrumentSize::BassViolin;
  throw AnalysisError("invalid-size", "unknown instrument size '" + s + "'");
}

const char* to_string(InstrumentSize s) {
  switch (s) {
    case InstrumentSize::Violin: return "violin";
    case InstrumentSize::Viola: return "viola";
    case InstrumentSize::TenorViolin: return "tenor_violin";
    case InstrumentSize::Cello: return "cello";
    default: return "bass_violin";
  }
}

std::vector<InstrumentRecord> load_corpus_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AnalysisError("io-error", "cannot open corpus file " + path);

  std::string header;
  if (!std::getline(in, header))
    throw AnalysisError("parse-error", path + ": missing header row");
  auto columns = split_csv_line(header);
  auto col = [&](const std::string& name) -> int {
    for (size_t i = 0; i < columns.size(); ++i)
      if (trim(columns[i]) == name) return static_cast<int>(i);
    return -1;
  };
  const int c_id = col("inventory_id");
  const int c_size = col("size");
  if (c_id < 0 || c_size < 0)
    throw AnalysisError("parse-error", path + ": header needs inventory_id and size");
  const int c_attr = col("attribution"), c_date = col("date");
  const int c_sb = col("sound_board_path"), c_back = col("back_path");
  const int c_body = col("body_path"), c_override = col("size_class_override");
  const int c_neck = col("neck_direction"), c_notes = col("notes");

  std::vector<InstrumentRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    auto field = [&](int c) -> std::string {
      return (c >= 0 && c < static_cast<int>(fields.size())) ? trim(fields[c]) : "";
    };

    InstrumentRecord r;
    r.inventory_id = field(c_id);
    if (r.inventory_id.empty())
      throw AnalysisError("parse-error", path + ": row with empty inventory_id");
    if (!seen.insert(r.inventory_id).second)
      throw AnalysisError("duplicate-id", "duplicate inventory_id " + r.inventory_id);
    r.size = instrument_size_from_string(field(c_size));
    r.size_class = default_size_class(r.size);
    const std::string override_text = field(c_override);
    if (override_text == "violin_viola") r.size_class = SizeClass::ViolinViola;
    else if (override_text == "cello") r.size_class = SizeClass::Cello;
    else if (!override_text.empty())
      throw AnalysisError("invalid-size", "unknown size_class_override '" + override_text + "'");
    r.attribution = field(c_attr);  // "?" kept verbatim
    r.date = field(c_date);
    r.sound_board_path = field(c_sb);
    r.back_path = field(c_back);
    r.body_path = field(c_body);
    const std::string neck = field(c_neck);
    if (!neck.empty()) r.neck_direction = parse_neck_direction(neck);
    r.notes = field(c_notes);
    records.push_back(std::move(r));
  }
  return records;
}

InstrumentReport run_instrument(const InstrumentRecord& record,
                                const AnalysisConfig& config) {
  InstrumentReport report;
  report.instrument_id = record.inventory_id;
  const fs::path outdir(config.output_dir);
  const ChannelParams& channel_params_for_size = config.channel_params(record.size_class);

  std::string stage = "load";
  try {
    if (record.sound_board_path.empty() && record.back_path.empty())
      throw AnalysisError("missing-input", "no plate mesh path given");

    std::optional<TriangleMesh> sound_board, back;
    {
      StageTimer timer(report, "load");
      if (!record.sound_board_path.empty())
        sound_board = load_mesh(record.sound_board_path).mesh;
      if (!record.back_path.empty())
        back = load_mesh(record.back_path).mesh;
      if (!record.body_path.empty()) {
        stage = "pca";
        auto [aligned_body, t] = pca_align(load_mesh(record.body_path).mesh);
        (void)aligned_body;
        if (sound_board) sound_board = apply_rigid_transform(*sound_board, t);
        if (back) back = apply_rigid_transform(*back, t);
      }
    }

    stage = "align";
    std::optional<TriangleMesh> sb_aligned, back_aligned;
    {
      StageTimer timer(report, "align");
      if (sound_board && back) {
        AlignedPair pair = align_to_symmetry_plane(*sound_board, *back);
        sb_aligned = std::move(pair.sound_board);
        back_aligned = std::move(pair.back);
        report.sound_board_residual_mm = pair.sound_board_residual_mm;
        report.back_residual_mm = pair.back_residual_mm;

        AngleRecord angles;
        angles.instrument_id = record.inventory_id;
        angles.sb_back_signed = signed_parallelism_angle(
            pair.sound_board_plane_before, pair.back_plane_before,
            record.neck_direction);
        const Plane horizontal = Plane::horizontal(0.0);
        angles.sym_horizontal = dihedral_angle(pair.symmetry_plane_before, horizontal);
        angles.sb_horizontal = dihedral_angle(pair.sound_board_plane_before, horizontal);
        angles.back_horizontal = dihedral_angle(pair.back_plane_before, horizontal);
        report.angles = angles;
      } else {
        report.status = InstrumentStatus::MissingPlate;
        report.warnings.push_back(sound_board ? "back missing" : "sound board missing");
        if (sound_board)
          sb_aligned = align_single_plate(*sound_board, PlateSide::SoundBoard);
        if (back) back_aligned = align_single_plate(*back, PlateSide::Back);
      }
    }

    auto process_plate = [&](const TriangleMesh& plate, PlateSide side) {
      const std::string tag = record.inventory_id + "_" +
                              (side == PlateSide::SoundBoard ? "sb" : "back");
      stage = "contours";
      ContourSet contours;
      {
        StageTimer timer(report, tag + ":contours");
        contours = contour_lines(plate, config.contour_spacing_mm,
                                 record.inventory_id, side);
      }
      stage = "grid";
      ElevationGrid grid;
      {
        StageTimer timer(report, tag + ":grid");
        grid = resample_grid(plate, config.grid_step_mm, side, config.jobs);
      }
      stage = "channel";
      ChannelPointSet channel;
      {
        StageTimer timer(report, tag + ":channel");
        channel = channel_points(grid, channel_params_for_size,
                                 record.inventory_id, config.jobs);
        channel = filter_arching_outliers(channel, grid);
      }
      stage = "emit";
      {
        StageTimer timer(report, tag + ":emit");
        if (config.emit.svg) {
          const std::string name = tag + "_contours.svg";
          write_file(outdir / name,
                     render_contours_svg(contours, &channel, record.size_class));
          report.emitted_files.push_back(name);
        }
        if (config.emit.csv) {
          const std::string cname = tag + "_contours.csv";
          write_file(outdir / cname, contour_set_csv(contours));
          report.emitted_files.push_back(cname);
          const std::string chname = tag + "_channel.csv";
          write_file(outdir / chname, channel_point_set_csv(channel));
          report.emitted_files.push_back(chname);
        }
        if (config.emit.raster) {
          const std::string rname = tag + "_grid.egrd";
          write_file(outdir / rname, elevation_grid_raster(grid));
          report.emitted_files.push_back(rname);
        }
      }
      for (const std::string& w : channel.warnings) report.warnings.push_back(w);
    };

    if (sb_aligned) process_plate(*sb_aligned, PlateSide::SoundBoard);
    if (back_aligned) process_plate(*back_aligned, PlateSide::Back);

    if (config.emit.json) {
      stage = "emit";
      const std::string jname = record.inventory_id + "_report.json";
      report.emitted_files.push_back(jname);
      write_file(outdir / jname, instrument_report_json(report, config));
    }
  } catch (const std::exception& e) {
    report.status = InstrumentStatus::Failed;
    report.failed_stage = stage;
    report.failure_message = e.what();
  }
  return report;
}

bool CorpusReport::all_ok() const {
  return std::all_of(instruments.begin(), instruments.end(),
                     [](const InstrumentReport& r) {
                       return r.status != InstrumentStatus::Failed;
                     });
}

CorpusReport run_corpus(const std::vector<InstrumentRecord>& records,
                        const AnalysisConfig& config) {
  if (records.empty())
    throw AnalysisError("empty-corpus", "no instruments to analyze");
  config.validate();

  CorpusReport corpus;
  corpus.instruments.resize(records.size());
  parallel_for(records.size(), config.jobs, [&](size_t i0, size_t i1) {
    for (size_t i = i0; i < i1; ++i)
      corpus.instruments[i] = run_instrument(records[i], config);
  });

  std::sort(corpus.instruments.begin(), corpus.instruments.end(),
            [](const InstrumentReport& a, const InstrumentReport& b) {
              return a.instrument_id < b.instrument_id;
            });

  std::vector<AngleRecord> ok_angles;
  for (const InstrumentReport& r : corpus.instruments) {
    if (r.status == InstrumentStatus::Ok && r.angles) ok_angles.push_back(*r.angles);
    for (const auto& [stage, secs] : r.stage_seconds)
      std::cerr << "[" << r.instrument_id << "] " << stage << " " << secs << "s\n";
  }
  corpus.histograms = angle_report(ok_angles, config.histogram_bin_deg);

  const fs::path outdir(config.output_dir);
  if (config.emit.csv) {
    write_file(outdir / "corpus_summary.csv", corpus_summary_csv(corpus));
    write_file(outdir / "angle_histograms.csv", angle_histograms_csv(corpus.histograms));
  }
  if (config.emit.json)
    write_file(outdir / "corpus_summary.json", corpus_summary_json(corpus, config));
  if (config.emit.svg) {
    for (const auto& name : AngleHistograms::histogram_names())
      write_file(outdir / ("angles_" + name + ".svg"),
                 angle_histogram_svg(corpus.histograms, name));
  }
  write_file(outdir / "analysis_config.txt", config_text(config));
  return corpus;
}

std::string corpus_summary_csv(const CorpusReport& report) {
  std::ostringstream out;
  out << "instrument_id,status,sb_back_signed_deg,sym_horizontal_deg,"
         "sb_horizontal_deg,back_horizontal_deg,sb_residual_mm,back_residual_mm\n";
  char buf[256];
  for (const InstrumentReport& r : report.instruments) {
    if (r.angles) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.9f,%.9f,%.9f,%.9f,%.6f,%.6f\n",
                    r.instrument_id.c_str(), status_string(r.status),
                    r.angles->sb_back_signed, r.angles->sym_horizontal,
                    r.angles->sb_horizontal, r.angles->back_horizontal,
                    r.sound_board_residual_mm, r.back_residual_mm);
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%s,,,,,,\n", r.instrument_id.c_str(),
                    status_string(r.status));
    }
    out << buf;
  }
  return out.str();
}

std::string instrument_report_json(const InstrumentReport& report,
                                   const AnalysisConfig& config) {
  ordered_json j;
  j["schema_version"] = 1;
  j["instrument_id"] = report.instrument_id;
  j["status"] = status_string(report.status);
  if (report.status == InstrumentStatus::Failed) {
    j["failed_stage"] = report.failed_stage;
    j["failure_message"] = report.failure_message;
  }
  if (report.angles) {
    j["angles_deg"]["sb_back_signed"] = report.angles->sb_back_signed;
    j["angles_deg"]["sym_horizontal"] = report.angles->sym_horizontal;
    j["angles_deg"]["sb_horizontal"] = report.angles->sb_horizontal;
    j["angles_deg"]["back_horizontal"] = report.angles->back_horizontal;
  } else {
    j["angles_deg"] = nullptr;
  }
  j["residuals_mm"]["sound_board"] = report.sound_board_residual_mm;
  j["residuals_mm"]["back"] = report.back_residual_mm;
  j["emitted_files"] = report.emitted_files;
  j["warnings"] = report.warnings;
  j["config"] = config_json(config);
  return j.dump(2) + "\n";
}

std::string corpus_summary_json(const CorpusReport& report,
                                const AnalysisConfig& config) {
  ordered_json j;
  j["schema_version"] = 1;
  j["config"] = config_json(config);
  ordered_json instruments = ordered_json::array();
  for (const InstrumentReport& r : report.instruments) {
    ordered_json ji;
    ji["instrument_id"] = r.instrument_id;
    ji["status"] = status_string(r.status);
    if (r.status == InstrumentStatus::Failed) {
      ji["failed_stage"] = r.failed_stage;
      ji["failure_message"] = r.failure_message;
    }
    if (r.angles) {
      ji["sb_back_signed_deg"] = r.angles->sb_back_signed;
      ji["sym_horizontal_deg"] = r.angles->sym_horizontal;
      ji["sb_horizontal_deg"] = r.angles->sb_horizontal;
      ji["back_horizontal_deg"] = r.angles->back_horizontal;
    }
    ji["emitted_files"] = r.emitted_files;
    instruments.push_back(std::move(ji));
  }
  j["instruments"] = std::move(instruments);
  return j.dump(2) + "\n";
}

}  // namespace vplate
