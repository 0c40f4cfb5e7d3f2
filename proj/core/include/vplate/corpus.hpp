#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vplate/alignment.hpp"
#include "vplate/config.hpp"

namespace vplate {

enum class InstrumentSize { Violin, Viola, TenorViolin, Cello, BassViolin };

InstrumentSize instrument_size_from_string(const std::string& s);
const char* to_string(InstrumentSize s);

/// One row of the corpus metadata table.
struct InstrumentRecord {
  std::string inventory_id;
  InstrumentSize size = InstrumentSize::Violin;
  SizeClass size_class = SizeClass::ViolinViola;  // derived, override honoured
  std::string attribution;  // "?" preserved verbatim
  std::string date;
  std::string sound_board_path;
  std::string back_path;
  std::string body_path;
  Vec2 neck_direction = Vec2(1.0, 0.0);
  std::string notes;
};

enum class InstrumentStatus { Ok, MissingPlate, Failed };

struct InstrumentReport {
  std::string instrument_id;
  InstrumentStatus status = InstrumentStatus::Ok;
  std::string failed_stage;  // set when status == Failed
  std::string failure_message;
  std::optional<AngleRecord> angles;
  double sound_board_residual_mm = 0.0;
  double back_residual_mm = 0.0;
  std::vector<std::string> emitted_files;  // relative to the output dir
  std::vector<std::string> warnings;
  // Wall-clock stage timings, logging only; never serialized (outputs must be
  // byte-identical across runs).
  std::vector<std::pair<std::string, double>> stage_seconds;
};

struct CorpusReport {
  std::vector<InstrumentReport> instruments;  // sorted by inventory_id
  AngleHistograms histograms;                 // over status-ok instruments only
  bool all_ok() const;  // every instrument Ok or MissingPlate
};

/// Parse the corpus CSV. Columns: inventory_id, size, attribution, date,
/// sound_board_path, back_path, body_path, size_class_override,
/// neck_direction, notes. Throws "duplicate-id", "invalid-size", "io-error".
std::vector<InstrumentRecord> load_corpus_metadata(const std::string& path);

/// Run the full pipeline on one instrument and emit its artifacts under
/// config.output_dir. Stage failures are captured in the report, not thrown.
InstrumentReport run_instrument(const InstrumentRecord& record,
                                const AnalysisConfig& config);

/// Per-instrument reports plus corpus-level angle histograms and summary
/// files. Throws "empty-corpus" for an empty record list.
CorpusReport run_corpus(const std::vector<InstrumentRecord>& records,
                        const AnalysisConfig& config);

std::string corpus_summary_csv(const CorpusReport& report);
std::string corpus_summary_json(const CorpusReport& report, const AnalysisConfig& config);
std::string instrument_report_json(const InstrumentReport& report,
                                   const AnalysisConfig& config);

}  // namespace vplate
