/* C interface to the symland library. All functions are thread-compatible; the last error
 * message is kept per thread. Strings returned through char** are owned by the caller and
 * released with symland_string_free. */
#ifndef SYMLAND_H
#define SYMLAND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define SYMLAND_API __attribute__((visibility("default")))
#else
#define SYMLAND_API
#endif

typedef enum symland_status {
  SYMLAND_OK = 0,
  SYMLAND_ERR_INVALID_ARGUMENT = 1,
  SYMLAND_ERR_UNKNOWN_FAMILY = 2,
  SYMLAND_ERR_NUMERIC = 3, /* Newton failure, non-convergence */
  SYMLAND_ERR_INTERNAL = 4
} symland_status;

typedef enum symland_kernel { SYMLAND_FROBENIUS = 0, SYMLAND_GAUSS = 1 } symland_kernel;

typedef struct symland_config symland_config;
typedef struct symland_point symland_point;

SYMLAND_API const char* symland_version(void);
/* Message for the most recent failing call on this thread; "" if none. */
SYMLAND_API const char* symland_last_error(void);
SYMLAND_API void symland_string_free(char* s);

/* Run configuration: keys as in the flat config file (command, families, d, kernel, tol,
 * seed, out, format, pattern, depth, r, restarts, hessian_cap). */
SYMLAND_API symland_status symland_config_new(symland_config** out);
SYMLAND_API void symland_config_free(symland_config* cfg);
SYMLAND_API symland_status symland_config_set(symland_config* cfg, const char* key, const char* value);
SYMLAND_API symland_status symland_config_load_text(symland_config* cfg, const char* text);
SYMLAND_API symland_status symland_config_load_file(symland_config* cfg, const char* path);

/* Output path set by the "out" key, or "" for none. Valid until the next set/load. */
SYMLAND_API const char* symland_config_output_path(const symland_config* cfg);

/* Runs the configured command. *report receives the rendered JSON or CSV and *exit_code
 * 0 (all verdicts pass), 1 (a verification failed) or 2 (usage error; *report is NULL).
 * When an output path is set the report is also written there. */
SYMLAND_API symland_status symland_run(const symland_config* cfg, char** report, int* exit_code);

/* Loss and gradient of a d x d weight matrix, row-major, against the identity target. */
SYMLAND_API symland_status symland_loss(symland_kernel kernel, int d, const double* w, double* out);
SYMLAND_API symland_status symland_gradient(symland_kernel kernel, int d, const double* w, double* grad_out);

/* A constructed catalog critical point, e.g. "C3", "C5t:0.7", "Cblock:2", "D1". */
SYMLAND_API symland_status symland_point_construct(const char* family, int d, symland_point** out);
SYMLAND_API void symland_point_free(symland_point* p);
SYMLAND_API int symland_point_dim(const symland_point* p);
SYMLAND_API double symland_point_loss(const symland_point* p);
/* Copies d*d entries, row-major. */
SYMLAND_API symland_status symland_point_weights(const symland_point* p, double* out);
/* Hessian index and nullity at the point. */
SYMLAND_API symland_status symland_point_index(const symland_point* p, long* index, long* nullity);

#ifdef __cplusplus
}
#endif

#endif
