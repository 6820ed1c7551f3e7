#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dsketch/analysis/report.hpp"
#include "dsketch/core/raster.hpp"
#include "dsketch/pipeline/config.hpp"
#include "dsketch/pipeline/dataset.hpp"

namespace dsketch {

/// Receives one progress line (no trailing newline).
using LogFn = std::function<void(const std::string&)>;

/// "novice"/"N" or "professional"/"P". Throws kValidation otherwise.
Group parse_style(std::string_view name);

enum class RegistrationLevel { kPixel, kStroke, kSketch };
RegistrationLevel parse_level(std::string_view name);
std::string_view to_string(RegistrationLevel level);

/// Writes `<name>.reg.json`, `<name>.registered.json` and, with snapshots,
/// `<name>.iterNN.png` into out_dir.
void run_register(const Config& config, const std::filesystem::path& sketch,
                  const std::filesystem::path& tracing, const std::filesystem::path& out_dir,
                  bool snapshots, const LogFn& log);
/// Registers every drawing of the dataset against its prompt's tracing.
void run_register_dataset(const Config& config, const std::filesystem::path& dataset,
                          const std::filesystem::path& out_dir, bool snapshots, const LogFn& log);

void run_fit_levels(const Config& config, const std::filesystem::path& original,
                    const std::filesystem::path& registered, const std::filesystem::path& out,
                    const LogFn& log);
/// Writes `<name>.levels.json` next to every `<name>.reg.json` in products.
void run_fit_levels_dataset(const Config& config, const std::filesystem::path& dataset,
                            const std::filesystem::path& products, const LogFn& log);

struct CdrEntry {
  std::string prompt_id;
  std::string group;
  std::size_t drawings = 0;
  RasterImage region;
};

struct DatasetAnalysis {
  AnalysisReport report;
  std::vector<CdrEntry> cdr;
};

/// Drawings without a reg sidecar or without a tracing are skipped (logged).
/// Missing levels sidecars are recomputed from the registered sketch.
DatasetAnalysis analyze_dataset(const Config& config, const Dataset& dataset,
                                const std::filesystem::path& products, const LogFn& log);
/// emit_report plus cdr.csv and cdr/<prompt>_<group>.png.
void run_analyze(const Config& config, const std::filesystem::path& dataset,
                 const std::filesystem::path& products, const std::filesystem::path& out_dir,
                 const LogFn& log);

inline constexpr const char* kCompareCsvHeader = "prompt_id,user_id,group,level,precision,recall";

/// P/R of an external line image against every registered drawing in `dir`
/// (optionally one prompt only).
void run_compare_synthetic(const Config& config, const std::filesystem::path& image,
                           const std::filesystem::path& dir, RegistrationLevel level,
                           const std::string& prompt, const std::filesystem::path& out_csv,
                           const LogFn& log);

void run_train_disturbers(const Config& config, const std::filesystem::path& dataset,
                          const std::filesystem::path& products, Group style,
                          const std::filesystem::path& out_dir, const LogFn& log);

/// Empty models_dir selects the statistical fallback disturbers.
void run_synthesize(const Config& config, const std::filesystem::path& tracing, Group style,
                    const std::filesystem::path& models_dir, const std::filesystem::path& out,
                    const std::filesystem::path& svg, const LogFn& log);

void run_rasterize(const Config& config, const std::filesystem::path& sketch, int line_width,
                   bool content_only, const std::filesystem::path& out, const LogFn& log);
void run_export_svg(const Config& config, const std::filesystem::path& sketch,
                    const std::filesystem::path& out, const LogFn& log);

}  // namespace dsketch
