/* C interface of the dsketch toolkit: sketch registration, analysis and
 * freehand-style synthesis. All functions returning ds_status set a
 * thread-local message readable through ds_last_error() on failure. */
#ifndef DSKETCH_DSKETCH_H
#define DSKETCH_DSKETCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DSKETCH_BUILDING)
#define DS_API __declspec(dllexport)
#else
#define DS_API __declspec(dllimport)
#endif
#else
#define DS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ds_status {
  DS_OK = 0,
  DS_ERR_FORMAT = 1,
  DS_ERR_VALIDATION = 2,
  DS_ERR_IO = 3,
  DS_ERR_DEGENERATE = 4,
  DS_ERR_CORRESPONDENCE = 5,
  DS_ERR_EMPTY = 6,
  DS_ERR_INVALID_ARGUMENT = 7,
  DS_ERR_KIND_MISMATCH = 8,
  DS_ERR_DIVERGENCE = 9,
  DS_ERR_MISSING_MODEL = 10,
  DS_ERR_INTERNAL = 100
} ds_status;

DS_API const char* ds_version(void);
DS_API int ds_format_version(void);
/* Message of the last failure on this thread; "" after a success. */
DS_API const char* ds_last_error(void);
DS_API const char* ds_status_name(ds_status status);
/* Process exit status for a result: 0 success, 2 I/O, 1 anything else. */
DS_API int ds_status_exit_code(ds_status status);

/* Progress lines of the batch commands go here; NULL restores the default
 * sink (standard error). */
typedef void (*ds_log_fn)(const char* line, void* user);
DS_API void ds_set_log(ds_log_fn fn, void* user);

/* Strings returned by the library are released with ds_string_free. */
DS_API void ds_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

typedef struct ds_config ds_config;

DS_API ds_status ds_config_create(ds_config** out);
DS_API void ds_config_free(ds_config* config);
/* Applies a JSON object (possibly partial) on top of the current values.
 * Unknown keys and out-of-range values fail with DS_ERR_VALIDATION and leave
 * the config unchanged. */
DS_API ds_status ds_config_merge_json(ds_config* config, const char* json_text);
DS_API ds_status ds_config_merge_file(ds_config* config, const char* path);
DS_API ds_status ds_config_to_json(const ds_config* config, char** out);

/* ---- sketches --------------------------------------------------------- */

typedef struct ds_sketch ds_sketch;

DS_API ds_status ds_sketch_load(const char* path, ds_sketch** out);
DS_API ds_status ds_sketch_parse(const char* json_text, ds_sketch** out);
DS_API void ds_sketch_free(ds_sketch* sketch);
DS_API ds_status ds_sketch_save(const ds_sketch* sketch, const char* path);
DS_API ds_status ds_sketch_to_json(const ds_sketch* sketch, char** out);
DS_API size_t ds_sketch_stroke_count(const ds_sketch* sketch);
DS_API size_t ds_sketch_point_count(const ds_sketch* sketch, size_t stroke);
/* Writes x, y, t (ms) and pressure of one point. */
DS_API ds_status ds_sketch_point(const ds_sketch* sketch, size_t stroke, size_t index, double out[4]);

/* ---- registration ----------------------------------------------------- */

typedef struct ds_registration_config {
  int iterations;
  double omega;
  int tolerance;
  double sigma_field;
  int content_only;
} ds_registration_config;

DS_API void ds_registration_config_default(ds_registration_config* config);

typedef struct ds_score {
  int iteration;
  int line_width;
  double precision;
  double recall;
  double e;
} ds_score;

typedef struct ds_registration ds_registration;

/* config may be NULL for the defaults. */
DS_API ds_status ds_register(const ds_sketch* sketch, const ds_sketch* tracing,
                             const ds_registration_config* config, ds_registration** out);
DS_API void ds_registration_free(ds_registration* registration);
DS_API int ds_registration_iterations(const ds_registration* registration);
/* 1-based index of the chosen iteration. */
DS_API int ds_registration_chosen(const ds_registration* registration);
DS_API ds_status ds_registration_score(const ds_registration* registration, int iteration,
                                       ds_score* out);
/* New sketch holding the snapshot of the chosen iteration. */
DS_API ds_status ds_registration_sketch(const ds_registration* registration, ds_sketch** out);

/* ---- similarity ------------------------------------------------------- */

typedef struct ds_similarity {
  double theta_deg;
  double scale;
  double tx;
  double ty;
} ds_similarity;

/* src and dst hold n interleaved (x, y) pairs. */
DS_API ds_status ds_fit_similarity(const double* src, const double* dst, size_t n,
                                   ds_similarity* out);

/* ---- synthesis -------------------------------------------------------- */

typedef struct ds_synthesis_config {
  double n1;
  double n2;
  uint64_t seed;
  double eps_c;
  double w_s;
  double w_m;
} ds_synthesis_config;

DS_API void ds_synthesis_config_default(ds_synthesis_config* config);

/* models_dir NULL selects the statistical fallback disturbers; style is
 * "novice" or "professional". */
DS_API ds_status ds_synthesize(const ds_sketch* tracing, const char* style, const char* models_dir,
                               const ds_synthesis_config* config, ds_sketch** out);

/* ---- batch commands ----------------------------------------------------
 * Each writes effective-config.json into its output directory. Optional
 * string arguments accept NULL or "". */

DS_API ds_status ds_cmd_register(const ds_config* config, const char* sketch, const char* tracing,
                                 const char* out_dir, int snapshots);
DS_API ds_status ds_cmd_register_dataset(const ds_config* config, const char* dataset,
                                         const char* out_dir, int snapshots);
DS_API ds_status ds_cmd_fit_levels(const ds_config* config, const char* original,
                                   const char* registered, const char* out);
DS_API ds_status ds_cmd_fit_levels_dataset(const ds_config* config, const char* dataset,
                                           const char* products);
DS_API ds_status ds_cmd_analyze(const ds_config* config, const char* dataset, const char* products,
                                const char* out_dir);
DS_API ds_status ds_cmd_compare_synthetic(const ds_config* config, const char* image,
                                          const char* registered_dir, const char* level,
                                          const char* prompt, const char* out_csv);
DS_API ds_status ds_cmd_train_disturbers(const ds_config* config, const char* dataset,
                                         const char* products, const char* style,
                                         const char* out_dir);
DS_API ds_status ds_cmd_synthesize(const ds_config* config, const char* tracing, const char* style,
                                   const char* models_dir, const char* out, const char* svg);
DS_API ds_status ds_cmd_rasterize(const ds_config* config, const char* sketch, int line_width,
                                  int content_only, const char* out);
DS_API ds_status ds_cmd_export_svg(const ds_config* config, const char* sketch, const char* out);

#ifdef __cplusplus
}
#endif

#endif
