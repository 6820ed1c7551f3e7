#include "dsketch/dsketch.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <string>

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"
#include "dsketch/pipeline/commands.hpp"
#include "dsketch/pixreg/registration.hpp"
#include "dsketch/simfit/similarity.hpp"
#include "dsketch/synthesis/synthesize.hpp"

struct ds_config {
  dsketch::Config value;
};

struct ds_sketch {
  dsketch::Sketch value;
};

struct ds_registration {
  dsketch::RegistrationResult value;
};

namespace {

namespace fs = std::filesystem;

thread_local std::string g_last_error;

std::mutex g_log_mutex;
ds_log_fn g_log = nullptr;
void* g_log_user = nullptr;

void emit(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_log) {
    g_log(line.c_str(), g_log_user);
  } else {
    std::fprintf(stderr, "%s\n", line.c_str());
  }
}

ds_status to_status(dsketch::ErrorCode code) {
  using dsketch::ErrorCode;
  switch (code) {
    case ErrorCode::kFormat:
      return DS_ERR_FORMAT;
    case ErrorCode::kValidation:
      return DS_ERR_VALIDATION;
    case ErrorCode::kIo:
      return DS_ERR_IO;
    case ErrorCode::kDegenerate:
      return DS_ERR_DEGENERATE;
    case ErrorCode::kCorrespondence:
      return DS_ERR_CORRESPONDENCE;
    case ErrorCode::kEmpty:
      return DS_ERR_EMPTY;
    case ErrorCode::kInvalidArgument:
      return DS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kKindMismatch:
      return DS_ERR_KIND_MISMATCH;
    case ErrorCode::kDivergence:
      return DS_ERR_DIVERGENCE;
    case ErrorCode::kMissingModel:
      return DS_ERR_MISSING_MODEL;
  }
  return DS_ERR_INTERNAL;
}

template <typename Fn>
ds_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DS_OK;
  } catch (const dsketch::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) dsketch::fail(dsketch::ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

fs::path opt_path(const char* s) { return s ? fs::path(s) : fs::path(); }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    dsketch::fail(dsketch::ErrorCode::kFormat, source + ": " + e.what());
  }
}

const dsketch::LogFn kLog = [](const std::string& line) { emit(line); };

}  // namespace

extern "C" {

const char* ds_version(void) { return dsketch::kToolkitVersion.data(); }

int ds_format_version(void) { return dsketch::kFormatVersion; }

const char* ds_last_error(void) { return g_last_error.c_str(); }

const char* ds_status_name(ds_status status) {
  switch (status) {
    case DS_OK:
      return "ok";
    case DS_ERR_FORMAT:
      return "format";
    case DS_ERR_VALIDATION:
      return "validation";
    case DS_ERR_IO:
      return "io";
    case DS_ERR_DEGENERATE:
      return "degenerate";
    case DS_ERR_CORRESPONDENCE:
      return "correspondence";
    case DS_ERR_EMPTY:
      return "empty";
    case DS_ERR_INVALID_ARGUMENT:
      return "invalid-argument";
    case DS_ERR_KIND_MISMATCH:
      return "kind-mismatch";
    case DS_ERR_DIVERGENCE:
      return "divergence";
    case DS_ERR_MISSING_MODEL:
      return "missing-model";
    case DS_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

int ds_status_exit_code(ds_status status) {
  if (status == DS_OK) return 0;
  if (status == DS_ERR_IO || status == DS_ERR_MISSING_MODEL) return 2;
  return 1;
}

void ds_set_log(ds_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log = fn;
  g_log_user = user;
}

void ds_string_free(char* s) { std::free(s); }

ds_status ds_config_create(ds_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ds_config{};
  });
}

void ds_config_free(ds_config* config) { delete config; }

ds_status ds_config_merge_json(ds_config* config, const char* json_text) {
  return guarded([&] {
    require(config, "config");
    require(json_text, "json_text");
    dsketch::merge_config(config->value, parse_json_text(json_text, "config"));
  });
}

ds_status ds_config_merge_file(ds_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    dsketch::merge_config(config->value, parse_json_text(dsketch::read_text_file(path), path));
  });
}

ds_status ds_config_to_json(const ds_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = dup_string(dsketch::dump_json(dsketch::config_to_json(config->value)));
  });
}

ds_status ds_sketch_load(const char* path, ds_sketch** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ds_sketch{dsketch::load_sketch(path)};
  });
}

ds_status ds_sketch_parse(const char* json_text, ds_sketch** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new ds_sketch{dsketch::parse_sketch(json_text)};
  });
}

void ds_sketch_free(ds_sketch* sketch) { delete sketch; }

ds_status ds_sketch_save(const ds_sketch* sketch, const char* path) {
  return guarded([&] {
    require(sketch, "sketch");
    require(path, "path");
    dsketch::save_sketch(sketch->value, path);
  });
}

ds_status ds_sketch_to_json(const ds_sketch* sketch, char** out) {
  return guarded([&] {
    require(sketch, "sketch");
    require(out, "out");
    *out = dup_string(dsketch::dump_json(dsketch::sketch_to_json(sketch->value)));
  });
}

size_t ds_sketch_stroke_count(const ds_sketch* sketch) { return sketch ? sketch->value.strokes.size() : 0; }

size_t ds_sketch_point_count(const ds_sketch* sketch, size_t stroke) {
  if (!sketch || stroke >= sketch->value.strokes.size()) return 0;
  return sketch->value.strokes[stroke].points.size();
}

ds_status ds_sketch_point(const ds_sketch* sketch, size_t stroke, size_t index, double out[4]) {
  return guarded([&] {
    require(sketch, "sketch");
    require(out, "out");
    const auto& strokes = sketch->value.strokes;
    if (stroke >= strokes.size() || index >= strokes[stroke].points.size())
      dsketch::fail(dsketch::ErrorCode::kInvalidArgument, "point index out of range");
    const dsketch::Point& p = strokes[stroke].points[index];
    out[0] = p.x;
    out[1] = p.y;
    out[2] = p.t;
    out[3] = p.pressure;
  });
}

void ds_registration_config_default(ds_registration_config* config) {
  if (!config) return;
  const dsketch::RegistrationConfig d;
  config->iterations = d.iterations;
  config->omega = d.omega;
  config->tolerance = d.tolerance;
  config->sigma_field = d.demons.sigma_field;
  config->content_only = d.content_only ? 1 : 0;
}

ds_status ds_register(const ds_sketch* sketch, const ds_sketch* tracing, const ds_registration_config* config,
                      ds_registration** out) {
  return guarded([&] {
    require(sketch, "sketch");
    require(tracing, "tracing");
    require(out, "out");
    dsketch::RegistrationConfig rc;
    if (config) {
      if (config->iterations < 1 || !(config->omega > 0) || config->tolerance < 0 || !(config->sigma_field > 0))
        dsketch::fail(dsketch::ErrorCode::kValidation, "registration config out of range");
      rc.iterations = config->iterations;
      rc.omega = config->omega;
      rc.tolerance = config->tolerance;
      rc.demons.sigma_field = config->sigma_field;
      rc.content_only = config->content_only != 0;
    }
    *out = new ds_registration{dsketch::register_pixel_level(sketch->value, tracing->value, rc)};
  });
}

void ds_registration_free(ds_registration* registration) { delete registration; }

int ds_registration_iterations(const ds_registration* r) { return r ? int(r->value.iterations.size()) : 0; }

int ds_registration_chosen(const ds_registration* r) { return r ? r->value.chosen : 0; }

ds_status ds_registration_score(const ds_registration* r, int iteration, ds_score* out) {
  return guarded([&] {
    require(r, "registration");
    require(out, "out");
    if (iteration < 1 || std::size_t(iteration) > r->value.iterations.size())
      dsketch::fail(dsketch::ErrorCode::kInvalidArgument, "iteration out of range");
    const dsketch::IterationScore& s = r->value.iterations[std::size_t(iteration) - 1].score;
    *out = {s.iteration, s.line_width, s.precision, s.recall, s.e};
  });
}

ds_status ds_registration_sketch(const ds_registration* r, ds_sketch** out) {
  return guarded([&] {
    require(r, "registration");
    require(out, "out");
    *out = new ds_sketch{r->value.registered()};
  });
}

ds_status ds_fit_similarity(const double* src, const double* dst, size_t n, ds_similarity* out) {
  return guarded([&] {
    require(src, "src");
    require(dst, "dst");
    require(out, "out");
    std::vector<dsketch::Vec2> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = {src[2 * i], src[2 * i + 1]};
      b[i] = {dst[2 * i], dst[2 * i + 1]};
    }
    const dsketch::SimilarityTransform t = dsketch::fit_similarity(a, b);
    *out = {t.theta_deg, t.scale, t.tx, t.ty};
  });
}

void ds_synthesis_config_default(ds_synthesis_config* config) {
  if (!config) return;
  const dsketch::SynthesisConfig d;
  config->n1 = d.n1;
  config->n2 = d.n2;
  config->seed = d.seed;
  config->eps_c = d.eps_c;
  config->w_s = d.layout.w_s;
  config->w_m = d.layout.w_m;
}

ds_status ds_synthesize(const ds_sketch* tracing, const char* style, const char* models_dir,
                        const ds_synthesis_config* config, ds_sketch** out) {
  return guarded([&] {
    require(tracing, "tracing");
    require(style, "style");
    require(out, "out");
    const dsketch::Group g = dsketch::parse_style(style);
    dsketch::SynthesisConfig sc;
    if (config) {
      sc.n1 = config->n1;
      sc.n2 = config->n2;
      sc.seed = config->seed;
      sc.eps_c = config->eps_c;
      sc.layout.w_s = config->w_s;
      sc.layout.w_m = config->w_m;
    }
    const dsketch::DisturberSet models = models_dir && *models_dir ? dsketch::load_disturber_set(models_dir, g)
                                                                   : dsketch::statistical_disturber_set(g);
    *out = new ds_sketch{dsketch::synthesize(tracing->value, models, sc)};
  });
}

ds_status ds_cmd_register(const ds_config* config, const char* sketch, const char* tracing, const char* out_dir,
                          int snapshots) {
  return guarded([&] {
    require(config, "config");
    require(sketch, "sketch");
    require(tracing, "tracing");
    require(out_dir, "out_dir");
    dsketch::run_register(config->value, sketch, tracing, out_dir, snapshots != 0, kLog);
  });
}

ds_status ds_cmd_register_dataset(const ds_config* config, const char* dataset, const char* out_dir,
                                  int snapshots) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(out_dir, "out_dir");
    dsketch::run_register_dataset(config->value, dataset, out_dir, snapshots != 0, kLog);
  });
}

ds_status ds_cmd_fit_levels(const ds_config* config, const char* original, const char* registered,
                            const char* out) {
  return guarded([&] {
    require(config, "config");
    require(original, "original");
    require(registered, "registered");
    require(out, "out");
    dsketch::run_fit_levels(config->value, original, registered, out, kLog);
  });
}

ds_status ds_cmd_fit_levels_dataset(const ds_config* config, const char* dataset, const char* products) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    const fs::path prod = products && *products ? fs::path(products) : fs::path(dataset);
    dsketch::run_fit_levels_dataset(config->value, dataset, prod, kLog);
  });
}

ds_status ds_cmd_analyze(const ds_config* config, const char* dataset, const char* products, const char* out_dir) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(out_dir, "out_dir");
    dsketch::run_analyze(config->value, dataset, opt_path(products), out_dir, kLog);
  });
}

ds_status ds_cmd_compare_synthetic(const ds_config* config, const char* image, const char* registered_dir,
                                   const char* level, const char* prompt, const char* out_csv) {
  return guarded([&] {
    require(config, "config");
    require(image, "image");
    require(registered_dir, "registered_dir");
    require(level, "level");
    require(out_csv, "out_csv");
    dsketch::run_compare_synthetic(config->value, image, registered_dir, dsketch::parse_level(level),
                                   prompt ? prompt : "", out_csv, kLog);
  });
}

ds_status ds_cmd_train_disturbers(const ds_config* config, const char* dataset, const char* products,
                                  const char* style, const char* out_dir) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(style, "style");
    require(out_dir, "out_dir");
    dsketch::run_train_disturbers(config->value, dataset, opt_path(products), dsketch::parse_style(style), out_dir,
                                  kLog);
  });
}

ds_status ds_cmd_synthesize(const ds_config* config, const char* tracing, const char* style, const char* models_dir,
                            const char* out, const char* svg) {
  return guarded([&] {
    require(config, "config");
    require(tracing, "tracing");
    require(style, "style");
    require(out, "out");
    dsketch::run_synthesize(config->value, tracing, dsketch::parse_style(style), opt_path(models_dir), out,
                            opt_path(svg), kLog);
  });
}

ds_status ds_cmd_rasterize(const ds_config* config, const char* sketch, int line_width, int content_only,
                           const char* out) {
  return guarded([&] {
    require(config, "config");
    require(sketch, "sketch");
    require(out, "out");
    dsketch::run_rasterize(config->value, sketch, line_width, content_only != 0, out, kLog);
  });
}

ds_status ds_cmd_export_svg(const ds_config* config, const char* sketch, const char* out) {
  return guarded([&] {
    require(config, "config");
    require(sketch, "sketch");
    require(out, "out");
    dsketch::run_export_svg(config->value, sketch, out, kLog);
  });
}

}  // extern "C"
