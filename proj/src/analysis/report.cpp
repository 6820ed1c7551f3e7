#include "dsketch/analysis/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "dsketch/analysis/stats.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Csv {
  std::ostringstream out;
  explicit Csv(const char* header) { out << header << '\n'; }
  template <typename... T>
  void row(const T&... cells) {
    std::size_t i = 0;
    ((out << (i++ ? "," : "") << cells), ...);
    out << '\n';
  }
};

using Metric = std::pair<const char*, double DrawingErrors::*>;
constexpr Metric kErrorMetrics[] = {
    {"E_GR", &DrawingErrors::e_gr}, {"E_GT", &DrawingErrors::e_gt}, {"E_GS", &DrawingErrors::e_gs},
    {"E_LR", &DrawingErrors::e_lr}, {"E_LT", &DrawingErrors::e_lt}, {"E_LS", &DrawingErrors::e_ls},
    {"E_P", &DrawingErrors::e_p}};

using Guideline = std::pair<const char*, double OrderingCosts::*>;
constexpr Guideline kGuidelines[] = {{"simplicity", &OrderingCosts::simplicity},
                                     {"proximity", &OrderingCosts::proximity},
                                     {"collinearity", &OrderingCosts::collinearity},
                                     {"anchoring", &OrderingCosts::anchoring}};

std::string drawings_csv(const std::vector<const DrawingAnalysis*>& rows) {
  Csv csv(kDrawingsCsvHeader);
  for (const DrawingAnalysis* d : rows) {
    std::string errs;
    for (const auto& [name, member] : kErrorMetrics)
      errs += "," + (d->errors ? num((*d->errors).*member) : std::string());
    csv.row(field(d->prompt_id), field(d->user_id), to_string(d->group), int(d->scaffold),
            num(d->e_star), int(d->valid), d->strokes, std::to_string(d->valid_strokes) + errs,
            num(d->ordering.simplicity), num(d->ordering.proximity),
            num(d->ordering.collinearity), num(d->ordering.anchoring), int(d->ordering.warning));
  }
  return csv.out.str();
}

std::string histograms_csv(const std::vector<NamedHistogram>& hists) {
  std::vector<const NamedHistogram*> order;
  for (const auto& h : hists) order.push_back(&h);
  std::stable_sort(order.begin(), order.end(), [](const NamedHistogram* a, const NamedHistogram* b) {
    return std::tie(a->group, a->metric) < std::tie(b->group, b->metric);
  });
  Csv csv(kHistogramsCsvHeader);
  for (const NamedHistogram* h : order)
    for (std::size_t i = 0; i < h->histogram.bins(); ++i)
      csv.row(field(h->group), field(h->metric), num(h->histogram.bin_edges[i]),
              num(h->histogram.bin_edges[i + 1]), h->histogram.counts[i]);
  return csv.out.str();
}

std::string temporal_csv(const std::vector<const DrawingAnalysis*>& rows) {
  Csv csv(kTemporalCsvHeader);
  for (const DrawingAnalysis* d : rows) {
    if (!d->temporal) continue;
    for (const auto& c : d->temporal->correlations)
      csv.row(field(d->prompt_id), field(d->user_id), to_string(d->group), to_string(c.feature),
              num(c.rho), num(c.p), to_string(c.cls));
  }
  return csv.out.str();
}

using ByGroup = std::map<std::string, std::vector<const DrawingAnalysis*>>;

std::string temporal_classes_csv(const ByGroup& groups) {
  Csv csv(kTemporalClassesCsvHeader);
  for (const auto& [group, rows] : groups) {
    std::vector<const TemporalProfile*> prof;
    for (const DrawingAnalysis* d : rows)
      if (d->temporal) prof.push_back(&*d->temporal);
    const double n = double(prof.size());
    for (TemporalFeature f : kTemporalFeatures) {
      double pos = 0, neg = 0, none = 0;
      for (const TemporalProfile* p : prof) {
        const CorrelationClass c = p->of(f).cls;
        (c == CorrelationClass::kPositive ? pos : c == CorrelationClass::kNegative ? neg : none) += 1;
      }
      if (n > 0) pos /= n, neg /= n, none /= n;
      csv.row(field(group), to_string(f), prof.size(), num(pos), num(neg), num(none));
    }
    for (const char* name : {"stroke_x", "stroke_y"}) {
      double pos = 0, neg = 0, none = 0;
      for (const TemporalProfile* p : prof) {
        const DirectionFractions& f = name[7] == 'x' ? p->stroke_x : p->stroke_y;
        pos += f.positive, neg += f.negative, none += f.none;
      }
      if (n > 0) pos /= n, neg /= n, none /= n;
      csv.row(field(group), name, prof.size(), num(pos), num(neg), num(none));
    }
  }
  return csv.out.str();
}

std::string ordering_csv(const ByGroup& groups) {
  Csv csv(kOrderingCsvHeader);
  for (const auto& [group, rows] : groups) {
    for (const auto& [name, member] : kGuidelines) {
      std::vector<double> v;
      for (const DrawingAnalysis* d : rows)
        if (!d->ordering.warning) v.push_back(d->ordering.*member);
      csv.row(field(group), name, v.size(), num(mean(v)), num(stddev(v)));
    }
  }
  return csv.out.str();
}

std::string scaffold_csv(const ByGroup& groups) {
  Csv csv(kScaffoldCsvHeader);
  for (const auto& [group, rows] : groups) {
    for (const auto& [name, member] : kErrorMetrics) {
      std::vector<double> without, with;
      for (const DrawingAnalysis* d : rows)
        if (d->valid && d->errors) (d->scaffold ? with : without).push_back((*d->errors).*member);
      std::string u, p;
      try {
        const UTest t = mann_whitney_u(without, with);
        u = num(t.u);
        p = num(t.p);
      } catch (const Error&) {
        // too few drawings in a condition, or no variation
      }
      csv.row(field(group), name, without.size(), num(mean(without)), with.size(), num(mean(with)),
              u, p);
    }
  }
  return csv.out.str();
}

}  // namespace

void emit_report(const AnalysisReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    fail(ErrorCode::kIo, "cannot create report directory '" + dir.string() + "'");

  std::vector<const DrawingAnalysis*> rows;
  for (const auto& d : report.drawings) rows.push_back(&d);
  std::stable_sort(rows.begin(), rows.end(), [](const DrawingAnalysis* a, const DrawingAnalysis* b) {
    return std::tie(a->prompt_id, a->user_id) < std::tie(b->prompt_id, b->user_id);
  });
  ByGroup groups;
  for (const DrawingAnalysis* d : rows) groups[std::string(to_string(d->group))].push_back(d);

  write_file_atomic(dir / "drawings.csv", drawings_csv(rows));
  write_file_atomic(dir / "histograms.csv", histograms_csv(report.histograms));
  write_file_atomic(dir / "temporal.csv", temporal_csv(rows));
  write_file_atomic(dir / "temporal_classes.csv", temporal_classes_csv(groups));
  write_file_atomic(dir / "ordering.csv", ordering_csv(groups));
  write_file_atomic(dir / "scaffold.csv", scaffold_csv(groups));

  nlohmann::json summary;
  summary["format_version"] = kFormatVersion;
  summary["toolkit_version"] = kToolkitVersion;
  summary["parameters"] = report.parameters;
  summary["drawings"] = rows.size();
  nlohmann::json g = nlohmann::json::object();
  for (const auto& [name, members] : groups) {
    std::size_t valid = 0, scaffold = 0;
    for (const DrawingAnalysis* d : members) {
      valid += d->valid;
      scaffold += d->scaffold;
    }
    g[name] = {{"drawings", members.size()}, {"valid", valid}, {"with_scaffold", scaffold}};
  }
  summary["groups"] = g;
  summary["files"] = {"drawings.csv", "histograms.csv", "temporal.csv", "temporal_classes.csv",
                      "ordering.csv", "scaffold.csv"};
  write_file_atomic(dir / "summary.json", dump_json(summary));
}

}  // namespace dsketch
