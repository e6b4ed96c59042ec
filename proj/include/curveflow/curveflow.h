#ifndef CURVEFLOW_H
#define CURVEFLOW_H

/* C interface to the curveflow library. Every function that can fail returns a
 * cf_status; on failure cf_last_error() describes the problem for the calling
 * thread. Handles are opaque and owned by the caller until destroyed. Strings
 * returned through char** out-parameters are released with cf_free_string. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CURVEFLOW_BUILDING)
#    define CF_API __declspec(dllexport)
#  else
#    define CF_API __declspec(dllimport)
#  endif
#else
#  define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_INVALID_ARGUMENT = 1,
  CF_NOT_CONVEX = 2,
  CF_DOMAIN = 3,
  CF_PARSE = 4,
  CF_IO = 5,
  CF_INTERNAL = 6
} cf_status;

typedef struct cf_spectrum cf_spectrum;
typedef struct cf_trajectory cf_trajectory;
typedef struct cf_config cf_config;

typedef struct cf_summary {
  double length;
  double area;
  double ipd;
  double ipr;
  double k_min;
  double k_max;
  double inv_curv_integral;
  double sq_curv_integral;
  int curvature_valid;
} cf_summary;

typedef struct cf_controls {
  double rel_tol;
  double abs_tol;
  double t_max;
  double length_blowup;
  double length_vanish;
  double area_vanish;
  double singularity_eps;
  double sample_interval;
} cf_controls;

typedef struct cf_state {
  double t;
  double length;
  double area;
  double ipd;
} cf_state;

typedef enum cf_event_kind {
  CF_EVENT_REACHED_HORIZON = 0,
  CF_EVENT_SINGULARITY = 1,
  CF_EVENT_LENGTH_BLOWUP = 2,
  CF_EVENT_LENGTH_VANISH = 3,
  CF_EVENT_AREA_VANISH = 4,
  CF_EVENT_H_DOMAIN_EXIT = 5,
  CF_EVENT_STEP_COLLAPSE = 6
} cf_event_kind;

typedef struct cf_event {
  cf_event_kind kind;
  double t;
  double theta;
} cf_event;

CF_API const char* cf_version(void);
CF_API const char* cf_last_error(void);
CF_API const char* cf_status_name(cf_status status);
CF_API void cf_free_string(char* s);

/* cos_coeffs[k] and sin_coeffs[k] hold mode k + 1; count >= 2. */
CF_API cf_status cf_spectrum_create(double mean, const double* cos_coeffs, const double* sin_coeffs,
                                    size_t count, cf_spectrum** out);
/* Support-function samples at theta_j = 2 pi j / count. */
CF_API cf_status cf_spectrum_from_samples(const double* samples, size_t count, size_t truncation,
                                          cf_spectrum** out);
/* Counter-clockwise vertices as interleaved x, y pairs. */
CF_API cf_status cf_spectrum_from_polygon(const double* xy, size_t vertex_count, size_t truncation,
                                          cf_spectrum** out);
CF_API cf_status cf_spectrum_from_json(const char* json, cf_spectrum** out);
CF_API cf_status cf_spectrum_to_json(const cf_spectrum* spec, char** out);
CF_API void cf_spectrum_destroy(cf_spectrum* spec);

CF_API size_t cf_spectrum_truncation(const cf_spectrum* spec);
CF_API double cf_spectrum_mean(const cf_spectrum* spec);
/* Mode n >= 1; modes beyond the truncation read as zero. */
CF_API cf_status cf_spectrum_mode(const cf_spectrum* spec, size_t n, double* a, double* b);
CF_API cf_status cf_spectrum_summarize(const cf_spectrum* spec, cf_summary* out);
/* Writes 2 * count doubles (x, y interleaved) at uniformly spaced normal angles. */
CF_API cf_status cf_curve_position(const cf_spectrum* spec, size_t count, double* xy_out);

CF_API void cf_controls_default(cf_controls* out);
CF_API cf_status cf_integrate(const cf_spectrum* initial, const char* flow, const cf_controls* controls,
                              cf_trajectory** out);
CF_API void cf_trajectory_destroy(cf_trajectory* traj);
CF_API size_t cf_trajectory_size(const cf_trajectory* traj);
CF_API cf_status cf_trajectory_state(const cf_trajectory* traj, size_t index, cf_state* out);
/* Borrowed spectrum of state `index`; valid while the trajectory lives. */
CF_API const cf_spectrum* cf_trajectory_spectrum(const cf_trajectory* traj, size_t index);
CF_API cf_status cf_trajectory_event(const cf_trajectory* traj, cf_event* out);
/* Borrowed strings, valid while the trajectory lives. */
CF_API const char* cf_trajectory_outcome(const cf_trajectory* traj);
CF_API const char* cf_trajectory_verdict(const cf_trajectory* traj);

CF_API cf_status cf_config_parse(const char* text, cf_config** out);
CF_API cf_status cf_config_load(const char* path, cf_config** out);
CF_API cf_status cf_config_emit(const cf_config* config, char** out);
CF_API void cf_config_destroy(cf_config* config);

/* out_dir may be NULL to use the config's own output directory. */
CF_API cf_status cf_run(const cf_config* config, const char* out_dir, char** verdict_out);
/* Summary CSV of the sweep; per-row failures appear in its error column. */
CF_API cf_status cf_sweep(const cf_config* config, const char* axis, const char* out_dir,
                          char** summary_csv_out);
/* Report CSV of the inequality suite on the initial curve; *all_satisfied is 0 or 1. */
CF_API cf_status cf_check(const cf_config* config, char** report_csv_out, int* all_satisfied);

#ifdef __cplusplus
}
#endif

#endif /* CURVEFLOW_H */
