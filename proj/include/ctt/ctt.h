#ifndef CTT_CTT_H
#define CTT_CTT_H

#include <stddef.h>

#if defined(_WIN32)
#define CTT_API __declspec(dllexport)
#else
#define CTT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctt_status {
  CTT_OK = 0,
  CTT_ERR_PARSE = 1,
  CTT_ERR_VALIDATION = 2,
  CTT_ERR_MODEL = 3,
  CTT_ERR_SOLVER = 4,
  CTT_ERR_EXTERNAL = 5,
  CTT_ERR_IO = 6,
  CTT_ERR_ARGUMENT = 7,
  CTT_ERR_INTERNAL = 8,
  CTT_ERR_INFEASIBLE = 9
} ctt_status;

typedef struct ctt_instance ctt_instance;
typedef struct ctt_solution ctt_solution;
typedef struct ctt_model ctt_model;
typedef struct ctt_report ctt_report;

/* Message and input line of the last failure on the calling thread. The
   line is 0 when the failure is not tied to one. */
CTT_API const char* ctt_last_error(void);
CTT_API int ctt_last_error_line(void);

/* Strings returned through char** out-parameters are released here. */
CTT_API void ctt_string_free(char* text);

typedef struct ctt_weights {
  int capacity;
  int spread;
  int compactness;
  int stability;
} ctt_weights;

CTT_API ctt_status ctt_instance_load(const char* path, ctt_instance** out);
CTT_API ctt_status ctt_instance_parse(const char* text, size_t length,
                                      ctt_instance** out);
CTT_API void ctt_instance_free(ctt_instance* instance);
CTT_API ctt_status ctt_instance_set_weights(ctt_instance* instance,
                                            const ctt_weights* weights);
CTT_API ctt_status ctt_instance_write(const ctt_instance* instance, char** out);

typedef struct ctt_stats {
  char name[128];
  int rooms;
  int periods;
  int courses;
  int events;
  int curricula;
  double frequency;   /* percent */
  double utilisation; /* percent */
  long edges;
  double density; /* percent */
} ctt_stats;

CTT_API ctt_status ctt_instance_stats(const ctt_instance* instance,
                                      ctt_stats* out);

CTT_API ctt_status ctt_solution_load(const ctt_instance* instance,
                                     const char* path, ctt_solution** out);
CTT_API ctt_status ctt_solution_parse(const ctt_instance* instance,
                                      const char* text, size_t length,
                                      ctt_solution** out);
CTT_API void ctt_solution_free(ctt_solution* solution);
CTT_API ctt_status ctt_solution_write(const ctt_instance* instance,
                                      const ctt_solution* solution, char** out);

typedef struct ctt_evaluation {
  long long capacity;
  long long spread;
  long long compactness;
  long long stability;
  long long objective;
  int feasible;
  int violations;
} ctt_evaluation;

/* `violations` may be NULL; otherwise receives one line per violation. */
CTT_API ctt_status ctt_evaluate(const ctt_instance* instance,
                                const ctt_solution* solution,
                                ctt_evaluation* out, char** violations);

/* Formulations: monolithic, surface, surface2, period-fixed, day-fixed,
   day-decomp, day-fixed-zero-stability. The last four need a basis. */
typedef struct ctt_build_options {
  const char* multiroom_policy; /* single, median-split, identity; NULL = median-split */
  int stratified_room_bounds;
  int clique_cuts;
  int implied_bound_cuts;
  int pattern_cuts;
} ctt_build_options;

CTT_API void ctt_build_options_init(ctt_build_options* options);
CTT_API ctt_status ctt_model_build(const ctt_instance* instance,
                                   const char* formulation,
                                   const ctt_solution* basis,
                                   const ctt_build_options* options,
                                   ctt_model** out);
CTT_API ctt_status ctt_model_parse_mps(const char* text, size_t length,
                                       ctt_model** out);
CTT_API void ctt_model_free(ctt_model* model);
CTT_API ctt_status ctt_model_size(const ctt_model* model, int* variables,
                                  int* constraints);
CTT_API ctt_status ctt_model_export_mps(const ctt_model* model, char** out);

/* Variable values implied by a timetable, as `name value` lines. */
CTT_API ctt_status ctt_model_encode(const ctt_instance* instance,
                                    const ctt_model* model,
                                    const ctt_solution* solution, char** out);
/* Checks `name value` lines against the model. */
CTT_API ctt_status ctt_model_check_values(const ctt_model* model,
                                          const char* text, size_t length,
                                          int* feasible, double* objective);
/* Timetable from `name value` lines of a model with Taught variables. */
CTT_API ctt_status ctt_model_decode(const ctt_instance* instance,
                                    const ctt_model* model, const char* text,
                                    size_t length, ctt_solution** out);

typedef struct ctt_solve_options {
  double time_limit; /* seconds; <= 0 for none */
  long node_limit;   /* <= 0 for none */
  double gap_target; /* <= 0 for none */
} ctt_solve_options;

typedef struct ctt_milp_result {
  char status[32];
  int has_solution;
  double objective;
  double lower_bound;
  long nodes;
} ctt_milp_result;

/* Built-in branch and bound. `values` may be NULL. */
CTT_API ctt_status ctt_model_solve(const ctt_model* model,
                                   const ctt_solve_options* options,
                                   ctt_milp_result* result, char** values);

enum {
  CTT_STRATEGY_CONTRACT = 0,
  CTT_STRATEGY_ANYTIME = 1
};
enum {
  CTT_SURFACE = 0,
  CTT_SURFACE2 = 1
};
enum {
  CTT_DIVE_PERIOD_FIXED = 0,
  CTT_DIVE_DAY_FIXED = 1,
  CTT_DIVE_DAY_DECOMP = 2,
  CTT_DIVE_DAY_FIXED_ZERO_STABILITY = 3
};

typedef struct ctt_strategy_config {
  int strategy;
  int surface;
  const char* multiroom_policy; /* NULL = median-split */
  int stratified_room_bounds;
  int surface_cuts;
  int dive_count;
  int dive_kinds[4];
  double dive_times[4];
  double surface_time;
  double total_time;
  double dive_gap_stop;
  int dives_per_kind; /* 0 = unlimited */
  int deterministic;  /* node limits replace clocks */
  long surface_node_limit; /* 0 = none */
  long dive_node_limit;    /* 0 = none */
} ctt_strategy_config;

/* Contract strategy: surface for 600/780 of `total_time`, then one
   PeriodFixed dive for 180/780 of it. */
CTT_API void ctt_strategy_config_init(ctt_strategy_config* config,
                                      double total_time);

CTT_API ctt_status ctt_run(const ctt_instance* instance,
                           const ctt_strategy_config* config, ctt_report** out);
CTT_API void ctt_report_free(ctt_report* report);
CTT_API ctt_status ctt_report_text(const ctt_report* report, char** out);
CTT_API ctt_status ctt_report_json(const ctt_report* report, char** out);
CTT_API ctt_status ctt_report_jsonl(const ctt_report* report, char** out);

typedef struct ctt_bounds {
  int infeasible;
  int has_upper;
  long long upper;
  int has_lower;
  long long lower;
} ctt_bounds;

CTT_API ctt_status ctt_report_bounds(const ctt_report* report, ctt_bounds* out);
/* *out is NULL when the run found no timetable. */
CTT_API ctt_status ctt_report_solution(const ctt_report* report,
                                       ctt_solution** out);

/* 100 * (1 - lower / upper) with one decimal, e.g. "44.4%". */
CTT_API ctt_status ctt_gap(long long upper, long long lower, char** out);

#ifdef __cplusplus
}
#endif

#endif
