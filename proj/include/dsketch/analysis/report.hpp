#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsketch/analysis/histogram.hpp"
#include "dsketch/analysis/metrics.hpp"
#include "dsketch/analysis/temporal.hpp"
#include "dsketch/core/sketch.hpp"
#include "json.hpp"

namespace dsketch {

struct DrawingAnalysis {
  std::string prompt_id;
  std::string user_id;
  Group group = Group::kNovice;
  bool scaffold = false;  // drawing has scaffold strokes
  double e_star = 0.0;
  bool valid = false;
  std::size_t strokes = 0;
  std::size_t valid_strokes = 0;
  std::optional<DrawingErrors> errors;      // valid drawings only
  std::optional<TemporalProfile> temporal;  // absent for zero-duration drawings
  OrderingCosts ordering;
};

struct NamedHistogram {
  std::string group;
  std::string metric;
  Histogram histogram;
};

struct AnalysisReport {
  std::vector<DrawingAnalysis> drawings;
  std::vector<NamedHistogram> histograms;
  nlohmann::json parameters = nlohmann::json::object();
};

inline constexpr const char* kDrawingsCsvHeader =
    "prompt_id,user_id,group,scaffold,e_star,valid,strokes,valid_strokes,"
    "E_GR,E_GT,E_GS,E_LR,E_LT,E_LS,E_P,"
    "simplicity,proximity,collinearity,anchoring,ordering_warning";
inline constexpr const char* kHistogramsCsvHeader = "group,metric,bin_lo,bin_hi,count";
inline constexpr const char* kTemporalCsvHeader = "prompt_id,user_id,group,feature,rho,p,class";
inline constexpr const char* kTemporalClassesCsvHeader =
    "group,feature,drawings,positive,negative,none";
inline constexpr const char* kOrderingCsvHeader = "group,guideline,n,mean,sd";
inline constexpr const char* kScaffoldCsvHeader =
    "group,metric,n_without,mean_without,n_with,mean_with,u,p";

/// Writes drawings.csv, histograms.csv, temporal.csv, temporal_classes.csv,
/// ordering.csv, scaffold.csv and summary.json into `dir` (created when
/// missing). Rows are ordered by (prompt_id, user_id) and by group name, so
/// identical inputs give identical bytes. Throws kIo when the directory
/// cannot be written.
void emit_report(const AnalysisReport& report, const std::filesystem::path& dir);

}  // namespace dsketch
