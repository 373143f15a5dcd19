#ifndef NLSV_NLSV_H
#define NLSV_NLSV_H

#include <stddef.h>
#include <stdint.h>

#if defined(NLSV_BUILDING_LIBRARY)
#define NLSV_API __attribute__((visibility("default")))
#else
#define NLSV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlsv_status {
  NLSV_OK = 0,
  NLSV_ERR_INVALID_ARGUMENT = 1,
  NLSV_ERR_CONFIG = 2,
  NLSV_ERR_NUMERICAL = 3,
  NLSV_ERR_IO = 4,
  NLSV_ERR_UNSUPPORTED = 5,
  NLSV_ERR_CONVERGENCE = 6,
  NLSV_ERR_INTERNAL = 7
} nlsv_status;

/* Opaque handles. */
typedef struct nlsv_config nlsv_config;
typedef struct nlsv_report nlsv_report;
typedef struct nlsv_field nlsv_field;

NLSV_API const char* nlsv_version(void);
NLSV_API const char* nlsv_status_name(nlsv_status status);

/* Process exit code for a status: 0 ok, 2 config, 3 numerical, 4 io, 1 other. */
NLSV_API int nlsv_exit_code(nlsv_status status);

/* JSON error document of the last failing call on this thread, or "" when the
   last call succeeded. Valid until the next call on the same thread. */
NLSV_API const char* nlsv_last_error(void);

/* Configuration documents. Overrides take "dotted.key=value"; values parse
   as JSON and fall back to strings. Validation happens in nlsv_config_validate
   and nlsv_run, and reports every violation. */
NLSV_API nlsv_status nlsv_config_from_json(const char* json, nlsv_config** out);
NLSV_API nlsv_status nlsv_config_from_file(const char* path, nlsv_config** out);
NLSV_API nlsv_status nlsv_config_override(nlsv_config* config, const char* assignment);
NLSV_API nlsv_status nlsv_config_validate(const nlsv_config* config);
/* Effective configuration as JSON; owned by the handle. */
NLSV_API const char* nlsv_config_json(const nlsv_config* config);
NLSV_API void nlsv_config_free(nlsv_config* config);

/* Runs the configured experiment. With write_files != 0 the report and the
   other artifacts go to the config's output_dir. A finished run with an
   evolution abort returns NLSV_ERR_NUMERICAL and still yields *out. */
NLSV_API nlsv_status nlsv_run(const nlsv_config* config, int write_files, nlsv_report** out);
NLSV_API const char* nlsv_report_json(const nlsv_report* report);
NLSV_API int nlsv_report_exit_code(const nlsv_report* report);
NLSV_API void nlsv_report_free(nlsv_report* report);

/* Admissibility report of a potential description, as JSON. */
NLSV_API nlsv_status nlsv_potential_admissibility(const char* potential_json, nlsv_report** out);

/* Fields on an n^3 periodic box [-L/2, L/2)^3, interleaved (re, im) samples,
   x fastest. */
NLSV_API nlsv_status nlsv_field_load(const char* path, nlsv_field** out);
NLSV_API nlsv_status nlsv_field_save(const nlsv_field* field, const char* path);
NLSV_API nlsv_status nlsv_field_create(int n, double box_length, const double* interleaved, nlsv_field** out);
NLSV_API int nlsv_field_n(const nlsv_field* field);
NLSV_API double nlsv_field_box_length(const nlsv_field* field);
/* Copies 2 n^3 doubles into dst. */
NLSV_API nlsv_status nlsv_field_copy(const nlsv_field* field, double* dst, size_t capacity);
NLSV_API void nlsv_field_free(nlsv_field* field);

#ifdef __cplusplus
}
#endif

#endif
