#include "dsketch/pipeline/commands.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "dsketch/analysis/metrics.hpp"
#include "dsketch/analysis/temporal.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/export.hpp"
#include "dsketch/core/sketch_io.hpp"
#include "parallel.hpp"

namespace dsketch {
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::kIo, "cannot create directory '" + dir.string() + "'");
}

fs::path parent_or_dot(const fs::path& file) {
  const fs::path p = file.parent_path();
  return p.empty() ? fs::path(".") : p;
}

void write_effective_config(const Config& config, const fs::path& dir) {
  ensure_dir(dir);
  write_file_atomic(dir / std::string(kEffectiveConfigName), dump_json(config_to_json(config)));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string safe_file_part(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

void log_line(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

const Sketch& require_tracing(const Dataset& d, const DatasetItem& item) {
  const Sketch* t = d.tracing_for(item.sketch.prompt_id);
  if (!t)
    fail(ErrorCode::kValidation,
         item.path.string() + ": no tracing with prompt_id '" + item.sketch.prompt_id + "' in the dataset");
  return *t;
}

RegistrationResult register_and_write(const Config& config, const Sketch& sketch, const Sketch& tracing,
                                      const std::string& name, const fs::path& out_dir, bool snapshots) {
  const RegistrationResult r = register_pixel_level(sketch, tracing, config.registration);
  write_file_atomic(reg_sidecar(out_dir, name), dump_json(reg_sidecar_json(r)));
  save_sketch(r.registered(), registered_sketch_path(out_dir, name));
  if (snapshots) {
    for (const auto& it : r.iterations) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, ".iter%02d.png", it.score.iteration);
      export_png(rasterize(it.sketch, 1, config.registration.content_only), out_dir / (name + suffix));
    }
  }
  return r;
}

std::string register_line(const std::string& name, const RegistrationResult& r) {
  const IterationScore& s = r.best().score;
  return "register sketch=" + name + " chosen=" + std::to_string(r.chosen) + " P=" + fmt(s.precision) +
         " R=" + fmt(s.recall) + " E=" + fmt(s.e);
}

// Registration products of one drawing, or the reason they are unusable.
struct Products {
  std::optional<RegSidecar> reg;
  std::optional<MultiLevelRegistration> levels;
  const Sketch* tracing = nullptr;
  std::string skip;
};

Products load_products(const Config& config, const Dataset& d, const DatasetItem& item, const fs::path& dir,
                       bool need_tracing) {
  Products p;
  p.tracing = d.tracing_for(item.sketch.prompt_id);
  if (need_tracing && !p.tracing) {
    p.skip = "no tracing for prompt '" + item.sketch.prompt_id + "'";
    return p;
  }
  const fs::path reg = reg_sidecar(dir, item.name);
  std::error_code ec;
  if (!fs::exists(reg, ec)) {
    p.skip = "no " + reg.filename().string();
    return p;
  }
  p.reg = read_reg_sidecar(reg);
  if (!same_topology(item.sketch, p.reg->registered))
    fail(ErrorCode::kCorrespondence, reg.string() + " does not match " + item.path.string());
  const fs::path lv = levels_sidecar(dir, item.name);
  if (fs::exists(lv, ec)) {
    p.levels = read_levels_sidecar(lv, item.sketch, p.reg->registered);
  } else {
    p.levels = register_multi_level(item.sketch, p.reg->registered, !config.registration.content_only);
  }
  return p;
}

bool has_scaffold(const Sketch& s) {
  for (const auto& st : s.strokes)
    if (!st.is_content()) return true;
  return false;
}

bool has_content_strokes(const Sketch& s) { return s.content_stroke_count() > 0; }

Vec2 mean_point(const Stroke& s) {
  Vec2 c;
  for (const Point& p : s.points) c += p.pos();
  return s.points.empty() ? c : c / double(s.points.size());
}

struct DrawingResult {
  bool used = false;
  DrawingAnalysis analysis;
  // histogram inputs, valid drawings only
  std::vector<double> rot_g, trans_g, scale_g, rot_l, trans_l, scale_l, displacement;
  Sketch registered;
};

DrawingResult analyze_one(const Config& config, const DatasetItem& item, const Products& p) {
  const int tol = config.analysis.tolerance;
  DrawingResult r;
  r.used = true;
  const Sketch& original = item.sketch;
  const Sketch& tracing = *p.tracing;
  const MultiLevelRegistration& lv = *p.levels;
  DrawingAnalysis& a = r.analysis;
  a.prompt_id = original.prompt_id;
  a.user_id = original.user_id;
  a.group = original.group;
  a.scaffold = has_scaffold(original);
  a.e_star = p.reg->e_star();
  a.valid = is_valid_drawing(a.e_star);
  const bool content = has_content_strokes(original);
  const std::vector<bool> ok = valid_strokes(lv.stroke_level.sketch, tracing, kValidStrokeRate, tol);
  for (std::size_t i = 0; i < original.strokes.size(); ++i) {
    if (content && !original.strokes[i].is_content()) continue;
    ++a.strokes;
    if (ok[i]) ++a.valid_strokes;
  }
  try {
    a.temporal = temporal_profile(original);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
  }
  a.ordering = ordering_costs(original);
  r.registered = p.reg->registered;
  if (!a.valid) return r;

  a.errors = scaffold_errors(lv, tracing, tol);
  const SimilarityTransform& g = lv.sketch_level.transform;
  r.rot_g.push_back(wrap_degrees(g.theta_deg));
  r.trans_g.push_back(norm(g.translation_about(object_center(tracing))));
  r.scale_g.push_back(g.scale);
  Sketch stroke_sel = lv.stroke_level.sketch, pixel_sel = lv.pixel_level;
  stroke_sel.strokes.clear();
  pixel_sel.strokes.clear();
  for (std::size_t i = 0; i < original.strokes.size(); ++i) {
    if (content && !original.strokes[i].is_content()) continue;
    if (!ok[i]) continue;
    stroke_sel.strokes.push_back(lv.stroke_level.sketch.strokes[i]);
    pixel_sel.strokes.push_back(lv.pixel_level.strokes[i]);
    if (i < lv.stroke_level.fallback.size() && lv.stroke_level.fallback[i]) continue;
    const SimilarityTransform rel = relative_transform(g, lv.stroke_level.transforms[i]);
    r.rot_l.push_back(wrap_degrees(rel.theta_deg));
    r.trans_l.push_back(norm(rel.translation_about(mean_point(lv.sketch_level.sketch.strokes[i]))));
    r.scale_l.push_back(rel.scale);
  }
  r.displacement = point_displacements(stroke_sel, pixel_sel);
  return r;
}

void write_cdr(const std::vector<CdrEntry>& cdr, double rho, const fs::path& out_dir) {
  std::string csv = "prompt_id,group,drawings,rho,pixels\n";
  for (const auto& c : cdr) {
    csv += csv_field(c.prompt_id) + "," + c.group + "," + std::to_string(c.drawings) + "," + fmt(rho) + "," +
           std::to_string(c.region.foreground_count()) + "\n";
  }
  write_file_atomic(out_dir / "cdr.csv", csv);
  if (cdr.empty()) return;
  ensure_dir(out_dir / "cdr");
  for (const auto& c : cdr)
    export_png(c.region, out_dir / "cdr" / (safe_file_part(c.prompt_id) + "_" + c.group + ".png"));
}

}  // namespace

Group parse_style(std::string_view name) {
  if (name == "novice" || name == "N" || name == "n") return Group::kNovice;
  if (name == "professional" || name == "P" || name == "p") return Group::kProfessional;
  fail(ErrorCode::kValidation, "style must be novice|professional (or N|P), got '" + std::string(name) + "'");
}

RegistrationLevel parse_level(std::string_view name) {
  if (name == "pixel") return RegistrationLevel::kPixel;
  if (name == "stroke") return RegistrationLevel::kStroke;
  if (name == "sketch") return RegistrationLevel::kSketch;
  fail(ErrorCode::kValidation, "level must be sketch|stroke|pixel, got '" + std::string(name) + "'");
}

std::string_view to_string(RegistrationLevel level) {
  switch (level) {
    case RegistrationLevel::kPixel:
      return "pixel";
    case RegistrationLevel::kStroke:
      return "stroke";
    case RegistrationLevel::kSketch:
      return "sketch";
  }
  return "pixel";
}

void run_register(const Config& config, const fs::path& sketch, const fs::path& tracing, const fs::path& out_dir,
                  bool snapshots, const LogFn& log) {
  const Sketch s = load_sketch(sketch);
  const Sketch t = load_sketch(tracing);
  write_effective_config(config, out_dir);
  const std::string name = sketch_name(sketch);
  log_line(log, register_line(name, register_and_write(config, s, t, name, out_dir, snapshots)));
}

void run_register_dataset(const Config& config, const fs::path& dataset, const fs::path& out_dir, bool snapshots,
                          const LogFn& log) {
  const Dataset d = load_dataset(dataset);
  for (const auto& item : d.drawings) require_tracing(d, item);
  write_effective_config(config, out_dir);
  std::vector<std::string> lines(d.drawings.size());
  parallel_for(d.drawings.size(), config.jobs, [&](std::size_t i) {
    const DatasetItem& item = d.drawings[i];
    const RegistrationResult r =
        register_and_write(config, item.sketch, require_tracing(d, item), item.name, out_dir, snapshots);
    lines[i] = register_line(item.name, r);
  });
  for (const auto& l : lines) log_line(log, l);
  log_line(log, "register drawings=" + std::to_string(d.drawings.size()));
}

void run_fit_levels(const Config& config, const fs::path& original, const fs::path& registered, const fs::path& out,
                    const LogFn& log) {
  const Sketch o = load_sketch(original);
  const Sketch r = read_registered_sketch(registered);
  const MultiLevelRegistration m = register_multi_level(o, r, !config.registration.content_only);
  write_effective_config(config, parent_or_dot(out));
  write_file_atomic(out, dump_json(levels_to_json(m)));
  log_line(log, "fit-levels sketch=" + sketch_name(original) + " theta=" + fmt(m.sketch_level.transform.theta_deg) +
                    " scale=" + fmt(m.sketch_level.transform.scale));
}

void run_fit_levels_dataset(const Config& config, const fs::path& dataset, const fs::path& products,
                            const LogFn& log) {
  const Dataset d = load_dataset(dataset);
  write_effective_config(config, products);
  std::size_t written = 0;
  for (const auto& item : d.drawings) {
    const fs::path reg = reg_sidecar(products, item.name);
    std::error_code ec;
    if (!fs::exists(reg, ec)) {
      log_line(log, "fit-levels skip=" + item.name + " reason=no-reg-sidecar");
      continue;
    }
    const Sketch r = read_reg_sidecar(reg).registered;
    const MultiLevelRegistration m = register_multi_level(item.sketch, r, !config.registration.content_only);
    write_file_atomic(levels_sidecar(products, item.name), dump_json(levels_to_json(m)));
    ++written;
  }
  log_line(log, "fit-levels drawings=" + std::to_string(written));
}

DatasetAnalysis analyze_dataset(const Config& config, const Dataset& d, const fs::path& products, const LogFn& log) {
  std::vector<DrawingResult> results(d.drawings.size());
  std::vector<std::string> skipped(d.drawings.size());
  parallel_for(d.drawings.size(), config.jobs, [&](std::size_t i) {
    const Products p = load_products(config, d, d.drawings[i], products, true);
    if (!p.skip.empty()) {
      skipped[i] = p.skip;
      return;
    }
    results[i] = analyze_one(config, d.drawings[i], p);
  });

  DatasetAnalysis out;
  AnalysisReport& rep = out.report;
  std::map<std::string, std::map<std::string, Histogram>> hist;  // group -> metric -> histogram
  auto add = [&](const std::string& group, const std::string& metric, const HistogramSpec& spec,
                 const std::vector<double>& values) {
    auto [it, fresh] = hist[group].try_emplace(metric, spec.make());
    it->second.add_all(values);
  };
  // prompt -> group -> registered valid drawings
  std::map<std::string, std::map<std::string, std::vector<Sketch>>> by_prompt;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!skipped[i].empty()) {
      log_line(log, "analyze skip=" + d.drawings[i].name + " reason=\"" + skipped[i] + "\"");
      continue;
    }
    const DrawingResult& r = results[i];
    rep.drawings.push_back(r.analysis);
    if (!r.analysis.valid) continue;
    const std::string g(to_string(r.analysis.group));
    add(g, "rotation_global", kRotationBins, r.rot_g);
    add(g, "translation_global", kTranslationBins, r.trans_g);
    add(g, "scale_global", kScaleBins, r.scale_g);
    add(g, "rotation_local", kRotationBins, r.rot_l);
    add(g, "translation_local", kTranslationBins, r.trans_l);
    add(g, "scale_local", kScaleBins, r.scale_l);
    add(g, "pixel_displacement", config.analysis.distance_bins, r.displacement);
    by_prompt[r.analysis.prompt_id][g].push_back(r.registered);
  }

  for (const auto& [prompt, groups] : by_prompt) {
    for (const auto& [g, drawings] : groups) {
      if (drawings.size() >= 2)
        out.cdr.push_back({prompt, g, drawings.size(), compute_cdr(drawings, config.analysis.rho)});
      for (const auto& [other, others] : groups) {
        if (other == g) continue;
        std::vector<RasterImage> from, to;
        for (const auto& s : drawings) from.push_back(rasterize(s, 1, has_content_strokes(s)));
        for (const auto& s : others) to.push_back(rasterize(s, 1, has_content_strokes(s)));
        std::vector<double> dist;
        try {
          dist = closest_distances(from, to);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kEmpty) throw;
        }
        add(g, "closest_distance_to_" + other, config.analysis.distance_bins, dist);
      }
    }
  }
  for (const auto& [g, metrics] : hist)
    for (const auto& [metric, h] : metrics) rep.histograms.push_back({g, metric, h});

  rep.parameters = {{"rho", config.analysis.rho},
                    {"tolerance", config.analysis.tolerance},
                    {"validity_threshold", kValidityThreshold},
                    {"valid_stroke_rate", kValidStrokeRate},
                    {"incorrect_stroke_rate", kIncorrectStrokeRate},
                    {"temporal_bins", kTemporalBins},
                    {"temporal_alpha", kTemporalAlpha}};
  return out;
}

void run_analyze(const Config& config, const fs::path& dataset, const fs::path& products, const fs::path& out_dir,
                 const LogFn& log) {
  const Dataset d = load_dataset(dataset);
  const DatasetAnalysis a = analyze_dataset(config, d, products.empty() ? dataset : products, log);
  ensure_dir(out_dir);
  emit_report(a.report, out_dir);
  write_cdr(a.cdr, config.analysis.rho, out_dir);
  write_effective_config(config, out_dir);
  log_line(log, "analyze drawings=" + std::to_string(a.report.drawings.size()) +
                    " histograms=" + std::to_string(a.report.histograms.size()));
}

void run_compare_synthetic(const Config& config, const fs::path& image, const fs::path& dir,
                           RegistrationLevel level, const std::string& prompt, const fs::path& out_csv,
                           const LogFn& log) {
  const RasterImage img = read_png(image);
  const Dataset d = load_dataset(dir);
  std::string csv = std::string(kCompareCsvHeader) + "\n";
  std::size_t rows = 0;
  for (const auto& item : d.drawings) {
    if (!prompt.empty() && item.sketch.prompt_id != prompt) continue;
    const Products p = load_products(config, d, item, dir, false);
    if (!p.skip.empty()) {
      log_line(log, "compare-synthetic skip=" + item.name + " reason=\"" + p.skip + "\"");
      continue;
    }
    const Sketch& s = level == RegistrationLevel::kPixel    ? p.reg->registered
                      : level == RegistrationLevel::kStroke ? p.levels->stroke_level.sketch
                                                            : p.levels->sketch_level.sketch;
    if (s.canvas_width != img.width || s.canvas_height != img.height)
      fail(ErrorCode::kValidation, "image size differs from the canvas of " + item.path.string());
    const LineImageScore sc = compare_line_image(img, s, config.analysis.tolerance);
    csv += csv_field(item.sketch.prompt_id) + "," + csv_field(item.sketch.user_id) + "," +
           std::string(to_string(item.sketch.group)) + "," + std::string(to_string(level)) + "," +
           fmt(sc.precision) + "," + fmt(sc.recall) + "\n";
    ++rows;
  }
  write_effective_config(config, parent_or_dot(out_csv));
  write_file_atomic(out_csv, csv);
  log_line(log, "compare-synthetic rows=" + std::to_string(rows));
}

void run_train_disturbers(const Config& config, const fs::path& dataset, const fs::path& products, Group style,
                          const fs::path& out_dir, const LogFn& log) {
  const Dataset d = load_dataset(dataset);
  const fs::path prod = products.empty() ? dataset : products;
  std::vector<TrainingDrawing> data;
  for (const auto& item : d.drawings) {
    if (item.sketch.group != style) continue;
    const Products p = load_products(config, d, item, prod, true);
    if (!p.skip.empty()) {
      log_line(log, "train-disturbers skip=" + item.name + " reason=\"" + p.skip + "\"");
      continue;
    }
    data.push_back({*p.levels, *p.tracing, p.reg->e_star()});
  }
  const TrainingSet pairs = build_training_pairs(data, style, config.analysis.tolerance);
  DisturberSet set{style, {}, {}, {}};
  std::vector<std::string> warnings;
  set.extrinsic = train_disturber(pairs.extrinsic, DisturberKind::kExtrinsic, style, config.synthesis.training, &warnings);
  set.intrinsic = train_disturber(pairs.intrinsic, DisturberKind::kIntrinsic, style, config.synthesis.training, &warnings);
  set.point = train_disturber(pairs.point, DisturberKind::kPoint, style, config.synthesis.training, &warnings);
  for (const auto& w : warnings) log_line(log, "train-disturbers warning=\"" + w + "\"");
  ensure_dir(out_dir);
  save_disturber_set(set, out_dir);
  write_effective_config(config, out_dir);
  for (const DisturberModel* m : {&*set.extrinsic, &*set.intrinsic, &*set.point}) {
    log_line(log, "train-disturbers kind=" + std::string(to_string(m->kind)) + " pairs=" + std::to_string(m->pairs) +
                      " loss=" + fmt(m->training.initial_loss) + "->" + fmt(m->training.final_loss));
  }
}

void run_synthesize(const Config& config, const fs::path& tracing, Group style, const fs::path& models_dir,
                    const fs::path& out, const fs::path& svg, const LogFn& log) {
  const Sketch t = load_sketch(tracing);
  if (t.group != Group::kTracing) log_line(log, "synthesize warning=\"input group is not tracing\"");
  DisturberSet models;
  if (models_dir.empty()) {
    models = statistical_disturber_set(style);
    log_line(log, "synthesize models=statistical style=" + std::string(to_string(style)));
  } else {
    models = load_disturber_set(models_dir, style);
  }
  std::vector<std::string> warnings;
  const Sketch s = synthesize(t, models, config.synthesis.synthesis, &warnings);
  for (const auto& w : warnings) log_line(log, "synthesize warning=\"" + w + "\"");
  write_effective_config(config, parent_or_dot(out));
  save_sketch(s, out);
  if (!svg.empty()) {
    ensure_dir(parent_or_dot(svg));
    export_svg(s, svg);
  }
  log_line(log, "synthesize strokes=" + std::to_string(s.strokes.size()) +
                    " seed=" + std::to_string(config.synthesis.synthesis.seed));
}

void run_rasterize(const Config& config, const fs::path& sketch, int line_width, bool content_only,
                   const fs::path& out, const LogFn& log) {
  if (line_width < 1) fail(ErrorCode::kValidation, "line width must be >= 1");
  const Sketch s = load_sketch(sketch);
  const RasterImage r = rasterize(s, line_width, content_only && has_content_strokes(s));
  write_effective_config(config, parent_or_dot(out));
  export_png(r, out);
  log_line(log, "rasterize pixels=" + std::to_string(r.foreground_count()));
}

void run_export_svg(const Config& config, const fs::path& sketch, const fs::path& out, const LogFn& log) {
  const Sketch s = load_sketch(sketch);
  write_effective_config(config, parent_or_dot(out));
  export_svg(s, out);
  log_line(log, "export-svg strokes=" + std::to_string(s.strokes.size()));
}

}  // namespace dsketch
