#ifndef NCERG_H
#define NCERG_H

/* C interface to the ergodic decomposition library. Handles are opaque;
 * every fallible call returns an ncerg_status and leaves a message for
 * ncerg_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with ncerg_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NCERG_API __declspec(dllexport)
#elif defined(__GNUC__)
#define NCERG_API __attribute__((visibility("default")))
#else
#define NCERG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ncerg_scenario ncerg_scenario;
typedef struct ncerg_report ncerg_report;

typedef enum {
  NCERG_OK = 0,
  NCERG_E_INVALID_ARGUMENT = 1,
  NCERG_E_SHAPE_MISMATCH = 2,
  NCERG_E_NOT_HERMITIAN = 3,
  NCERG_E_NOT_POSITIVE = 4,
  NCERG_E_PRECONDITION = 5,
  NCERG_E_VALIDATION = 6,
  NCERG_E_SCHEMA = 7,
  NCERG_E_NUMERICAL = 8,
  NCERG_E_IO = 9,
  NCERG_E_INTERNAL = 99
} ncerg_status;

typedef enum {
  NCERG_VERDICT_PASS = 0,
  NCERG_VERDICT_FAIL = 1,
  NCERG_VERDICT_UNKNOWN = 2
} ncerg_verdict;

typedef enum {
  NCERG_FORMAT_REPORT_JSON = 0,
  NCERG_FORMAT_DECAY_CSV = 1,
  NCERG_FORMAT_SPECTRUM_CSV = 2
} ncerg_format;

/* Unset fields are left as in the scenario. tasks is a comma-separated list
 * or NULL. */
typedef struct {
  int has_seed;
  uint64_t seed;
  int has_tol_fixed;
  double tol_fixed;
  int has_decay_tol;
  double decay_tol;
  int has_n_max;
  int n_max;
  const char* tasks;
} ncerg_overrides;

NCERG_API const char* ncerg_version(void);
NCERG_API const char* ncerg_status_string(ncerg_status status);
NCERG_API const char* ncerg_verdict_string(ncerg_verdict verdict);
/* Message of the last failed call on this thread, "" if none. */
NCERG_API const char* ncerg_last_error(void);
NCERG_API void ncerg_string_free(char* s);

NCERG_API ncerg_status ncerg_format_parse(const char* name, ncerg_format* out);

/* overrides may be NULL. */
NCERG_API ncerg_status ncerg_scenario_load(const char* path, const ncerg_overrides* overrides,
                                           ncerg_scenario** out);
NCERG_API ncerg_status ncerg_scenario_parse(const char* json, const ncerg_overrides* overrides,
                                            ncerg_scenario** out);
NCERG_API const char* ncerg_scenario_name(const ncerg_scenario* scenario);
/* Normalized document with defaults filled in. */
NCERG_API ncerg_status ncerg_scenario_document(const ncerg_scenario* scenario, char** json);
NCERG_API void ncerg_scenario_free(ncerg_scenario* scenario);

NCERG_API size_t ncerg_gallery_count(void);
NCERG_API const char* ncerg_gallery_name(size_t index);
NCERG_API ncerg_status ncerg_gallery_get(size_t index, const ncerg_overrides* overrides,
                                         ncerg_scenario** out);

NCERG_API ncerg_status ncerg_run(const ncerg_scenario* scenario, ncerg_report** out);
NCERG_API ncerg_status ncerg_report_load(const char* path, ncerg_report** out);
NCERG_API const char* ncerg_report_name(const ncerg_report* report);
NCERG_API ncerg_verdict ncerg_report_verdict(const ncerg_report* report);
NCERG_API size_t ncerg_report_task_count(const ncerg_report* report);
NCERG_API const char* ncerg_report_task_name(const ncerg_report* report, size_t index);
NCERG_API ncerg_verdict ncerg_report_task_verdict(const ncerg_report* report, size_t index);
/* Status and reason of a task ("ok", "skipped", "error"); reason may be "". */
NCERG_API const char* ncerg_report_task_status(const ncerg_report* report, size_t index);
NCERG_API const char* ncerg_report_task_reason(const ncerg_report* report, size_t index);
NCERG_API ncerg_status ncerg_report_render(const ncerg_report* report, ncerg_format format,
                                           char** text);
/* path may be NULL. */
NCERG_API ncerg_status ncerg_report_emit(const ncerg_report* report, ncerg_format format,
                                         const char* out_dir, char** path);
NCERG_API void ncerg_report_free(ncerg_report* report);

#ifdef __cplusplus
}
#endif

#endif
