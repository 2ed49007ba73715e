#ifndef PERCSIM_PERCSIM_H
#define PERCSIM_PERCSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PERCSIM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PERCSIM_API __attribute__((visibility("default")))
#else
#define PERCSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum percsim_status {
  PERCSIM_OK = 0,
  PERCSIM_INVALID_ARGUMENT = 1,
  PERCSIM_CONFIG = 2,
  PERCSIM_NUMERICAL = 3,
  PERCSIM_IO = 4,
  PERCSIM_INTERNAL = 5
} percsim_status;

typedef struct percsim_scenario percsim_scenario;
typedef struct percsim_result percsim_result;

typedef struct percsim_summary {
  int steps;
  int has_rms;
  double rms_formation;
  double sup_cov_norm;
  double sum_cov_norm;
  double missed_fraction;
  double mean_latency;
  double final_obs_ratio;
  int has_nominal_rate;
  double nominal_selection_rate;
  double max_formation_error;
  int aborted;
} percsim_summary;

PERCSIM_API const char* percsim_version(void);
/* Message for the last non-OK status on this thread; never NULL. */
PERCSIM_API const char* percsim_last_error(void);

PERCSIM_API percsim_status percsim_scenario_load(const char* path, percsim_scenario** out);
PERCSIM_API percsim_status percsim_scenario_parse(const char* json_text, percsim_scenario** out);
PERCSIM_API void percsim_scenario_free(percsim_scenario* sc);
PERCSIM_API percsim_status percsim_scenario_set_seed(percsim_scenario* sc, uint64_t seed);
/* Same axes as percsim_sweep: "p", "n_blocks", "b", "q", "seed". */
PERCSIM_API percsim_status percsim_scenario_set_param(percsim_scenario* sc, const char* axis, double value);
PERCSIM_API percsim_status percsim_scenario_validate(const percsim_scenario* sc);
PERCSIM_API const char* percsim_scenario_name(const percsim_scenario* sc);

/* On a numerical abort returns PERCSIM_NUMERICAL and still hands back the partial result. */
PERCSIM_API percsim_status percsim_run(const percsim_scenario* sc, percsim_result** out);
PERCSIM_API void percsim_result_free(percsim_result* r);
PERCSIM_API percsim_status percsim_result_summary(const percsim_result* r, percsim_summary* out);
PERCSIM_API size_t percsim_result_tick_count(const percsim_result* r);
PERCSIM_API percsim_status percsim_result_write_ticks_csv(const percsim_result* r, const char* path);
PERCSIM_API percsim_status percsim_result_write_summary_json(const percsim_result* r, const char* path);
PERCSIM_API percsim_status percsim_result_summary_json(const percsim_result* r, char** out);

PERCSIM_API percsim_status percsim_sweep(const percsim_scenario* sc, const char* axis, const double* values,
                                         size_t n_values, int seeds, char** json_out, char** table_out);
PERCSIM_API percsim_status percsim_report(const char* dir, char** out);

PERCSIM_API void percsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
