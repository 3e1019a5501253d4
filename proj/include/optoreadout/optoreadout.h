/*
 * Copyright 2026 The optoreadout Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the optoreadout library.
 *
 * Every function returns an orx_status; on failure the message is available
 * from orx_last_error() on the calling thread until the next call. Handles
 * are opaque and owned by the caller, who releases them with the matching
 * *_free function (NULL is accepted).
 */

#ifndef OPTOREADOUT_H
#define OPTOREADOUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ORX_API __declspec(dllexport)
#else
#define ORX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum orx_status {
  ORX_OK = 0,
  ORX_ERR_ARGUMENT = 2,
  ORX_ERR_CONFIG = 3,
  ORX_ERR_NUMERIC = 4,
  ORX_ERR_IO = 5,
  ORX_ERR_INTERNAL = 6
} orx_status;

typedef enum orx_scheme {
  ORX_SCHEME_MW_MW = 0,
  ORX_SCHEME_MW_OPT = 1,
  ORX_SCHEME_OPT_OPT = 2
} orx_scheme;

typedef enum orx_format { ORX_FORMAT_CSV = 0, ORX_FORMAT_BIN = 1 } orx_format;

typedef struct orx_config orx_config;
typedef struct orx_scenario orx_scenario;
typedef struct orx_shot_run orx_shot_run;
typedef struct orx_budget_table orx_budget_table;

ORX_API const char* orx_version(void);
ORX_API const char* orx_last_error(void);

/* Hex SHA-256 of a byte buffer; `out` must hold 65 bytes. */
ORX_API orx_status orx_sha256_hex(const void* data, size_t size, char* out);

ORX_API orx_status orx_scheme_parse(const char* text, orx_scheme* out);
ORX_API const char* orx_scheme_name(orx_scheme scheme);
ORX_API orx_status orx_format_parse(const char* text, orx_format* out);

/* ---- configuration ---- */

ORX_API orx_status orx_config_load(const char* path, orx_config** out);
ORX_API orx_status orx_config_parse(const char* yaml_text, orx_config** out);
ORX_API void orx_config_free(orx_config* config);
/* `out` must hold 65 bytes. */
ORX_API orx_status orx_config_hash(const orx_config* config, char* out);
ORX_API orx_status orx_config_set_seed(orx_config* config, uint64_t seed);
ORX_API orx_status orx_config_set_shots(orx_config* config, uint64_t shots_per_state);
ORX_API orx_status orx_config_set_threads(orx_config* config, unsigned threads);
ORX_API orx_status orx_config_get_seed(const orx_config* config, uint64_t* out);
ORX_API orx_status orx_config_get_shots(const orx_config* config, uint64_t* out);

typedef struct orx_derived {
  double eta_c, eta_e, eta_o;
  double microwave_reflectivity;
  double cooperativity; /* at the configured target */
} orx_derived;

ORX_API orx_status orx_config_derived(const orx_config* config, orx_derived* out);

/* ---- readout traces ---- */

/* Runs both qubit branches of one scheme. */
ORX_API orx_status orx_scenario_run(const orx_config* config, orx_scheme scheme,
                                    orx_scenario** out);
ORX_API void orx_scenario_free(orx_scenario* scenario);
ORX_API orx_status orx_scenario_size(const orx_scenario* scenario, size_t* out);
/* Copies `n` samples of the branch `state` ('g' or 'e'); NULL buffers are skipped. */
ORX_API orx_status orx_scenario_trace(const orx_scenario* scenario, char state, double* time,
                                      double* re, double* im, size_t n);
ORX_API orx_status orx_scenario_steady_power(const orx_scenario* scenario, char state,
                                             double* out);
ORX_API orx_status orx_scenario_background_power(const orx_scenario* scenario, double* out);
/* Writes trace_<state>.<ext> for `states` ("g", "e" or "ge") plus
 * steady_state.txt into `dir`. `header` lines are newline-separated. */
ORX_API orx_status orx_scenario_write(const orx_scenario* scenario, const char* dir,
                                      const char* states, const char* header,
                                      orx_format format);

/* ---- single-shot pipeline ---- */

typedef struct orx_fidelity {
  double fidelity;
  double p_e_given_g, p_g_given_e;
  double eps_g, eps_e, eps_ol;
  double integration_time;
  double threshold;
  double snr;
  double sigma_det, eta_det;
  uint64_t shots;
  uint64_t empirical_overlap_errors, empirical_overlap_shots;
  int meaningful;
  int degenerate;
} orx_fidelity;

ORX_API orx_status orx_shots_run(const orx_config* config, orx_scheme scheme,
                                 orx_shot_run** out);
ORX_API void orx_shots_free(orx_shot_run* run);
ORX_API orx_status orx_shots_report(const orx_shot_run* run, orx_fidelity* out);
/* Copies scores (shot order g, e, g, e, ...). */
ORX_API orx_status orx_shots_scores(const orx_shot_run* run, double* scores, size_t n);
/* Writes shots.<ext>, histogram.<ext> and report.txt into `dir`. */
ORX_API orx_status orx_shots_write(const orx_shot_run* run, const char* dir, const char* header,
                                   orx_format format);

/* ---- coherence budget ---- */

typedef struct orx_budget_row {
  double value;
  double rep_rate, p_avg;
  double t_qubit, t_cavity;
  double t1, t2;
  double p_thermal;
  double fidelity, q;
  double cooperativity, eta_eo;
} orx_budget_row;

/* variable: rep_rate, power, temperature or cooperativity. */
ORX_API orx_status orx_budget_sweep(const orx_config* config, const char* variable,
                                    const double* values, size_t n, orx_budget_table** out);
ORX_API void orx_budget_free(orx_budget_table* table);
ORX_API orx_status orx_budget_size(const orx_budget_table* table, size_t* out);
ORX_API orx_status orx_budget_row_at(const orx_budget_table* table, size_t index,
                                     orx_budget_row* out);
/* Writes budget.<ext> into `dir`. */
ORX_API orx_status orx_budget_write(const orx_budget_table* table, const char* dir,
                                    const char* header, orx_format format);

/* ---- plain files ---- */

ORX_API orx_status orx_write_text(const char* path, const char* text);
/* Returns a malloc'ed copy of the file; release with orx_string_free. */
ORX_API orx_status orx_read_text(const char* path, char** out);
ORX_API void orx_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* OPTOREADOUT_H */
