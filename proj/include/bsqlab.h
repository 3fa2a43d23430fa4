/* bsqlab — spectral Boussinesq laboratory, C API.
 *
 * All functions return bsq_status; BSQ_OK is 0. On failure,
 * bsq_last_error() describes what went wrong (thread-local). Objects are
 * opaque handles released with their matching _destroy/_free call.
 */
#ifndef BSQLAB_H
#define BSQLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsq_status {
    BSQ_OK = 0,
    BSQ_ERR_INVALID_ARGUMENT = 1,
    BSQ_ERR_CONFIG = 2,
    BSQ_ERR_NUMERICAL = 3,
    BSQ_ERR_DOMAIN = 4,
    BSQ_ERR_IO = 5,
    BSQ_ERR_UNSUPPORTED = 6,
    BSQ_ERR_INTERNAL = 7
} bsq_status;

typedef struct bsq_box bsq_box;
typedef struct bsq_field bsq_field; /* scalar or vector spectral field */

const char* bsq_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* bsq_last_error(void);

/* Free any char* the library handed out. */
void bsq_string_free(char* s);

/* ---- boxes ---- */

bsq_status bsq_box_create(double period_L, int resolution_N, double dealias_fraction, bsq_box** out);
void bsq_box_destroy(bsq_box* box);
double bsq_box_period(const bsq_box* box);
int bsq_box_resolution(const bsq_box* box);

/* ---- fields ---- */

void bsq_field_destroy(bsq_field* field);
bsq_status bsq_field_is_vector(const bsq_field* field, int* out);
bsq_status bsq_field_save(const bsq_field* field, const char* path);
bsq_status bsq_field_load(const char* path, bsq_field** out);

/* Synthetic data with prescribed Gevrey radius and H^s amplitude.
 * shape: "exp-decay" | "single-mode" | "band-limited". */
bsq_status bsq_make_gevrey_scalar(const bsq_box* box, double radius_r, double sobolev_s, double amplitude,
                                  uint64_t seed, const char* shape, bsq_field** out);
bsq_status bsq_make_gevrey_vector(const bsq_box* box, double radius_r, double sobolev_s, double amplitude,
                                  uint64_t seed, const char* shape, int divergence_free, bsq_field** out);

/* ---- norms and diagnostics ---- */

bsq_status bsq_sobolev_norm(const bsq_field* field, double s, double* out);
bsq_status bsq_gevrey_norm(const bsq_field* field, double s, double r, double* out);
bsq_status bsq_lp_norm(const bsq_field* field, double p, double* out); /* p = INFINITY for sup */
bsq_status bsq_radius_estimate(const bsq_field* field, double* radius, double* r_squared);
bsq_status bsq_besov_norm(const bsq_field* field, double* out); /* scalar fields only */
bsq_status bsq_annulus_sup(const bsq_field* field, int k, double* out);
bsq_status bsq_liouville_indicator(const bsq_field* u, const bsq_field* theta, double* out);
double bsq_control_gevrey_constant(double r); /* (3/(2r))^2; NaN for r <= 0 */

/* ---- harness ---- */

/* Validate a JSON config; on success *echo_json receives the canonical echo
 * (caller frees with bsq_string_free). On BSQ_ERR_CONFIG, *diagnostics (when
 * non-NULL) receives newline-separated field-level messages. */
bsq_status bsq_validate_config(const char* json_text, char** echo_json, char** diagnostics);

/* Run a scenario. out_dir_override (nullable) replaces output_dir;
 * seed_override applies when >= 0. *summary_json (nullable) receives the
 * summary document. Returns BSQ_ERR_NUMERICAL when a stage fails; artifacts
 * written so far are kept. */
bsq_status bsq_run_scenario(const char* json_text, const char* out_dir_override, int64_t seed_override,
                            char** summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BSQLAB_H */
