// Command-line front end for the plate-geometry pipeline:
//   vplate analyze <corpus.csv> --out <dir> [--config <file>] [--only id,...]
//   vplate analyze-one --sound-board <mesh> --back <mesh> --size-class <class>
//   vplate default-config [path]

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vplate/corpus.hpp"
#include "vplate/errors.hpp"

namespace {

int finish(const vplate::CorpusReport& report) {
  for (const auto& r : report.instruments) {
    std::cout << r.instrument_id << ": ";
    switch (r.status) {
      case vplate::InstrumentStatus::Ok:
        std::cout << "ok\n";
        break;
      case vplate::InstrumentStatus::MissingPlate:
        std::cout << "missing_plate\n";
        break;
      case vplate::InstrumentStatus::Failed:
        std::cout << "failed (" << r.failed_stage << "): " << r.failure_message
                  << "\n";
        break;
    }
  }
  return report.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric analysis of violin-family plate meshes: symmetry-plane "
               "alignment, dihedral angles, contour lines and the channel of minima"};
  app.require_subcommand(1);

  std::string corpus_path, config_path, out_dir = "out", only, emit_list;
  int jobs = 0;

  auto* analyze = app.add_subcommand("analyze", "Run the pipeline over a corpus CSV");
  analyze->add_option("corpus", corpus_path, "Corpus metadata CSV")->required();
  analyze->add_option("--config", config_path, "Analysis config file");
  analyze->add_option("--out", out_dir, "Output directory");
  analyze->add_option("--only", only, "Comma-separated instrument ids to run");
  analyze->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  analyze->add_option("--emit", emit_list, "Outputs to emit: svg,csv,json,raster");

  std::string sb_path, back_path, size_class_text = "violin_viola", one_id = "instrument";
  auto* analyze_one =
      app.add_subcommand("analyze-one", "Run the pipeline on a single instrument");
  analyze_one->add_option("--sound-board", sb_path, "Sound board mesh (PLY/OBJ)");
  analyze_one->add_option("--back", back_path, "Back mesh (PLY/OBJ)");
  analyze_one->add_option("--size-class", size_class_text, "violin_viola or cello");
  analyze_one->add_option("--id", one_id, "Instrument label for outputs");
  analyze_one->add_option("--config", config_path, "Analysis config file");
  analyze_one->add_option("--out", out_dir, "Output directory");
  analyze_one->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  analyze_one->add_option("--emit", emit_list, "Outputs to emit: svg,csv,json,raster");

  std::string default_config_path;
  auto* default_config =
      app.add_subcommand("default-config", "Print (or write) the default config");
  default_config->add_option("path", default_config_path, "Destination file");

  CLI11_PARSE(app, argc, argv);

  try {
    vplate::AnalysisConfig config;
    if (!config_path.empty()) config = vplate::load_config(config_path);
    config.output_dir = out_dir;
    if (jobs > 0) config.jobs = jobs;
    if (!emit_list.empty()) config.emit = vplate::parse_emit_flags(emit_list);

    if (default_config->parsed()) {
      const std::string text = vplate::config_text(vplate::AnalysisConfig{});
      if (default_config_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(default_config_path);
        out << text;
      }
      return 0;
    }

    if (analyze->parsed()) {
      auto records = vplate::load_corpus_metadata(corpus_path);
      if (!only.empty()) {
        std::vector<vplate::InstrumentRecord> selected;
        std::istringstream ss(only);
        std::string id;
        while (std::getline(ss, id, ',')) {
          bool found = false;
          for (const auto& r : records)
            if (r.inventory_id == id) { selected.push_back(r); found = true; }
          if (!found) {
            std::cerr << "unknown instrument id: " << id << "\n";
            return 2;
          }
        }
        records = std::move(selected);
      }
      return finish(vplate::run_corpus(records, config));
    }

    // analyze-one
    if (sb_path.empty() && back_path.empty()) {
      std::cerr << "analyze-one needs --sound-board and/or --back\n";
      return 2;
    }
    vplate::InstrumentRecord record;
    record.inventory_id = one_id;
    if (size_class_text == "violin_viola") {
      record.size = vplate::InstrumentSize::Violin;
      record.size_class = vplate::SizeClass::ViolinViola;
    } else if (size_class_text == "cello") {
      record.size = vplate::InstrumentSize::Cello;
      record.size_class = vplate::SizeClass::Cello;
    } else {
      std::cerr << "unknown size class: " << size_class_text << "\n";
      return 2;
    }
    record.sound_board_path = sb_path;
    record.back_path = back_path;
    return finish(vplate::run_corpus({record}, config));
  } catch (const vplate::AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
