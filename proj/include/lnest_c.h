/* Copyright 2026 The lnest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LNEST_C_H_
#define LNEST_C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LNEST_API __declspec(dllexport)
#else
#define LNEST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lnest_status {
  LNEST_OK = 0,
  LNEST_E_NON_HERMITIAN = 1,
  LNEST_E_NO_CONVERGENCE = 2,
  LNEST_E_DEGENERATE_SAMPLES = 3,
  LNEST_E_DIMENSION_MISMATCH = 4,
  LNEST_E_TPCP_VIOLATION = 5,
  LNEST_E_INCONSISTENT_KRAUS = 6,
  LNEST_E_STEP_TOO_LARGE = 7,
  LNEST_E_REDUCTION_INVALID = 8,
  LNEST_E_EMPTY_SUM = 9,
  LNEST_E_SINGULAR_FISHER = 10,
  LNEST_E_BAD_PROBABILITIES = 11,
  LNEST_E_CONFIG_INVALID = 12,
  LNEST_E_IO = 13,
  LNEST_E_INVALID_ARGUMENT = 14,
  LNEST_E_INTERNAL = 99
} lnest_status;

typedef struct lnest_scenario lnest_scenario;
typedef struct lnest_report lnest_report;
typedef struct lnest_channel lnest_channel;

/* Receives one line of progress text; the pointer is valid only during the
 * call. */
typedef void (*lnest_line_fn)(const char* line, void* user);

LNEST_API const char* lnest_version(void);
LNEST_API const char* lnest_status_name(lnest_status status);
/* Message of the last failing call on this thread, "" if none. */
LNEST_API const char* lnest_last_error(void);

/* Named scenarios. */
LNEST_API int lnest_scenario_count(void);
LNEST_API const char* lnest_scenario_name_at(int index);
LNEST_API lnest_status lnest_scenario_create(const char* name, lnest_scenario** out);
LNEST_API lnest_status lnest_scenario_load(const char* path, lnest_scenario** out);
LNEST_API lnest_status lnest_scenario_from_json(const char* text, lnest_scenario** out);
LNEST_API void lnest_scenario_free(lnest_scenario* sc);
LNEST_API const char* lnest_scenario_name(const lnest_scenario* sc);
LNEST_API const char* lnest_scenario_summary(const lnest_scenario* sc);
LNEST_API lnest_status lnest_scenario_dims(const lnest_scenario* sc, int* dim, int* params);
/* Direction is renormalised to sum 1; components must be positive. */
LNEST_API lnest_status lnest_scenario_set_direction(lnest_scenario* sc, const double* dir, int n);
LNEST_API lnest_status lnest_scenario_set_scales(lnest_scenario* sc, const double* scales, int n);
LNEST_API lnest_status lnest_scenario_set_seed(lnest_scenario* sc, uint64_t seed);
LNEST_API lnest_status lnest_scenario_set_shots(lnest_scenario* sc, int64_t shots);
/* 0 selects the hardware concurrency. Never changes results. */
LNEST_API lnest_status lnest_scenario_set_workers(lnest_scenario* sc, int workers);

LNEST_API lnest_status lnest_run_sweep(const lnest_scenario* sc, lnest_report** out);

/* Reports. */
LNEST_API void lnest_report_free(lnest_report* r);
LNEST_API int lnest_report_passed(const lnest_report* r);
LNEST_API int lnest_report_failed_count(const lnest_report* r);
LNEST_API int lnest_report_point_count(const lnest_report* r);
LNEST_API int lnest_report_check_count(const lnest_report* r);
/* name points into the report. ok is 1 when the check agrees with its
 * expectation (informational checks are always ok). */
LNEST_API lnest_status lnest_report_check(const lnest_report* r, int index, const char** name, int* ok,
                                          double* value);
LNEST_API lnest_status lnest_report_check_by_name(const lnest_report* r, const char* name, int* ok,
                                                  double* value);
/* Copies up to capacity values of a point quantity; count receives the full
 * size. Missing quantities give LNEST_E_INVALID_ARGUMENT. */
LNEST_API lnest_status lnest_report_point_value(const lnest_report* r, int point, const char* quantity,
                                                double* values, int capacity, int* count);
LNEST_API lnest_status lnest_report_point_scale(const lnest_report* r, int point, double* scale);
/* Slope of a fitted quantity; vanishing is 1 when the series sits at the
 * numerical zero floor (slope is then NaN). */
LNEST_API lnest_status lnest_report_fit(const lnest_report* r, const char* quantity, double* slope,
                                        int* vanishing);
/* format is "jsonl" or "csv". */
LNEST_API lnest_status lnest_report_write(const lnest_report* r, const char* path, const char* format);
/* Caller frees the string with lnest_string_free. */
LNEST_API lnest_status lnest_report_render(const lnest_report* r, const char* format, char** out);
LNEST_API const char* lnest_report_summary(const lnest_report* r);
LNEST_API void lnest_string_free(char* s);

/* Property suite over seeded random channels. */
LNEST_API lnest_status lnest_random_suite(int seeds, uint64_t base_seed, int workers, lnest_line_fn progress,
                                          void* user, lnest_report** out);
/* Runs the named scenarios and the random suite. all_passed receives 1 when
 * every report passes. Reports are written to out_dir when it is non-NULL. */
LNEST_API lnest_status lnest_verify(int seeds, int workers, const char* out_dir, const char* format,
                                    lnest_line_fn progress, void* user, int* all_passed);

/* Low-level channel access. Complex arrays are interleaved (re, im),
 * matrices row-major. */
LNEST_API lnest_status lnest_channel_from_json(const char* text, lnest_channel** out);
LNEST_API lnest_status lnest_channel_from_scenario(const lnest_scenario* sc, lnest_channel** out);
LNEST_API lnest_status lnest_channel_random(int dim, int params, int kraus_per_param, uint64_t seed,
                                            int with_hamiltonian, lnest_channel** out);
LNEST_API void lnest_channel_free(lnest_channel* ch);
LNEST_API lnest_status lnest_channel_dims(const lnest_channel* ch, int* dim, int* params);
/* rho and out hold 2 * dim * dim doubles; eps holds params doubles. */
LNEST_API lnest_status lnest_channel_apply(const lnest_channel* ch, const double* rho, const double* eps,
                                           double* out);
LNEST_API lnest_status lnest_channel_tpcp_residual(const lnest_channel* ch, const double* eps, double* out);
/* phi holds 2 * dim doubles; fisher receives params * params doubles. */
LNEST_API lnest_status lnest_quantum_fisher_pure(const lnest_channel* ch, const double* phi, const double* eps,
                                                 double* fisher);

#ifdef __cplusplus
}
#endif

#endif /* LNEST_C_H_ */
