#include "ctt/ctt.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "ctt/control.hpp"
#include "ctt/error.hpp"
#include "ctt/evaluation.hpp"
#include "ctt/formulations.hpp"
#include "ctt/instance.hpp"
#include "ctt/milp.hpp"
#include "ctt/solver.hpp"

struct ctt_instance {
  ctt::Instance value;
};

struct ctt_solution {
  ctt::Solution value;
};

struct ctt_model {
  ctt::MilpModel value;
  std::vector<ctt::MultiRoom> multirooms;
};

struct ctt_report {
  ctt::RunReport value;
};

namespace {

thread_local std::string last_error;
thread_local int last_line = 0;

struct ArgumentError : ctt::Error {
  using ctt::Error::Error;
};

ctt_status fail(ctt_status status, const std::string& message, int line = 0) {
  last_error = message;
  last_line = line;
  return status;
}

template <typename F>
ctt_status guard(F&& body) {
  try {
    last_error.clear();
    last_line = 0;
    body();
    return CTT_OK;
  } catch (const ctt::ParseError& e) {
    return fail(CTT_ERR_PARSE, e.what(), e.line());
  } catch (const ctt::ValidationError& e) {
    return fail(CTT_ERR_VALIDATION, e.what());
  } catch (const ctt::ModelError& e) {
    return fail(CTT_ERR_MODEL, e.what());
  } catch (const ctt::SolverError& e) {
    return fail(CTT_ERR_SOLVER, e.what());
  } catch (const ctt::ExternalSolverError& e) {
    return fail(CTT_ERR_EXTERNAL, e.what());
  } catch (const ctt::IoError& e) {
    return fail(CTT_ERR_IO, e.what());
  } catch (const ArgumentError& e) {
    return fail(CTT_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CTT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CTT_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw ArgumentError(message);
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.data(), text.size() + 1);
  return out;
}

ctt::MultiRoomPolicy policy_of(const char* name) {
  if (!name) return ctt::MultiRoomPolicy::kMedianSplit;
  auto policy = ctt::parse_multiroom_policy(name);
  if (!policy) {
    throw ArgumentError(std::string("unknown multi-room policy '") + name + "'");
  }
  return *policy;
}

ctt::NeighborhoodKind dive_of(int code) {
  switch (code) {
    case CTT_DIVE_PERIOD_FIXED:
      return ctt::NeighborhoodKind::kPeriodFixed;
    case CTT_DIVE_DAY_FIXED:
      return ctt::NeighborhoodKind::kDayFixed;
    case CTT_DIVE_DAY_DECOMP:
      return ctt::NeighborhoodKind::kDayDecomp;
    case CTT_DIVE_DAY_FIXED_ZERO_STABILITY:
      return ctt::NeighborhoodKind::kDayFixedZeroStability;
  }
  throw ArgumentError("unknown dive kind " + std::to_string(code));
}

int dive_code(ctt::NeighborhoodKind kind) {
  switch (kind) {
    case ctt::NeighborhoodKind::kPeriodFixed:
      return CTT_DIVE_PERIOD_FIXED;
    case ctt::NeighborhoodKind::kDayFixed:
      return CTT_DIVE_DAY_FIXED;
    case ctt::NeighborhoodKind::kDayDecomp:
      return CTT_DIVE_DAY_DECOMP;
    case ctt::NeighborhoodKind::kDayFixedZeroStability:
      return CTT_DIVE_DAY_FIXED_ZERO_STABILITY;
  }
  return CTT_DIVE_PERIOD_FIXED;
}

}  // namespace

extern "C" {

const char* ctt_last_error(void) { return last_error.c_str(); }

int ctt_last_error_line(void) { return last_line; }

void ctt_string_free(char* text) { std::free(text); }

ctt_status ctt_instance_load(const char* path, ctt_instance** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new ctt_instance{ctt::load_ctt(path)};
  });
}

ctt_status ctt_instance_parse(const char* text, size_t length,
                              ctt_instance** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new ctt_instance{ctt::parse_ctt(std::string_view(text, length))};
  });
}

void ctt_instance_free(ctt_instance* instance) { delete instance; }

ctt_status ctt_instance_set_weights(ctt_instance* instance,
                                    const ctt_weights* weights) {
  return guard([&] {
    require(instance && weights, "null argument");
    require(weights->capacity >= 0 && weights->spread >= 0 &&
                weights->compactness >= 0 && weights->stability >= 0,
            "weights must be non-negative");
    instance->value = instance->value.with_weights(
        {weights->capacity, weights->spread, weights->compactness,
         weights->stability});
  });
}

ctt_status ctt_instance_write(const ctt_instance* instance, char** out) {
  return guard([&] {
    require(instance && out, "null argument");
    *out = copy_string(ctt::write_ctt(instance->value));
  });
}

ctt_status ctt_instance_stats(const ctt_instance* instance, ctt_stats* out) {
  return guard([&] {
    require(instance && out, "null argument");
    const auto s = ctt::instance_stats(instance->value);
    std::memset(out, 0, sizeof *out);
    std::strncpy(out->name, instance->value.name().c_str(),
                 sizeof out->name - 1);
    out->rooms = s.rooms;
    out->periods = s.periods;
    out->courses = s.courses;
    out->events = s.events;
    out->curricula = s.curricula;
    out->frequency = 100.0 * s.frequency;
    out->utilisation = 100.0 * s.utilisation;
    out->edges = static_cast<long>(s.conflict_edges);
    out->density = 100.0 * s.density;
  });
}

ctt_status ctt_solution_load(const ctt_instance* instance, const char* path,
                             ctt_solution** out) {
  return guard([&] {
    require(instance && path && out, "null argument");
    *out = new ctt_solution{ctt::load_solution(instance->value, path)};
  });
}

ctt_status ctt_solution_parse(const ctt_instance* instance, const char* text,
                              size_t length, ctt_solution** out) {
  return guard([&] {
    require(instance && text && out, "null argument");
    *out = new ctt_solution{
        ctt::parse_solution(instance->value, std::string_view(text, length))};
  });
}

void ctt_solution_free(ctt_solution* solution) { delete solution; }

ctt_status ctt_solution_write(const ctt_instance* instance,
                              const ctt_solution* solution, char** out) {
  return guard([&] {
    require(instance && solution && out, "null argument");
    *out = copy_string(ctt::write_solution(instance->value, solution->value));
  });
}

ctt_status ctt_evaluate(const ctt_instance* instance,
                        const ctt_solution* solution, ctt_evaluation* out,
                        char** violations) {
  return guard([&] {
    require(instance && solution && out, "null argument");
    const auto& in = instance->value;
    const auto verdict = ctt::check_hard(in, solution->value);
    const auto p = ctt::penalties(in, solution->value);
    out->capacity = p.capacity;
    out->spread = p.spread;
    out->compactness = p.compactness;
    out->stability = p.stability;
    out->objective = ctt::objective(in.weights(), p);
    out->feasible = verdict.ok();
    out->violations = static_cast<int>(verdict.violations.size());
    if (violations) {
      std::ostringstream text;
      for (const auto& v : verdict.violations) {
        text << ctt::to_string(v.kind) << ": " << v.detail << "\n";
      }
      *violations = copy_string(text.str());
    }
  });
}

void ctt_build_options_init(ctt_build_options* options) {
  if (options) std::memset(options, 0, sizeof *options);
}

ctt_status ctt_model_build(const ctt_instance* instance,
                           const char* formulation, const ctt_solution* basis,
                           const ctt_build_options* options, ctt_model** out) {
  return guard([&] {
    require(instance && formulation && out, "null argument");
    ctt_build_options defaults;
    ctt_build_options_init(&defaults);
    const auto& opt = options ? *options : defaults;
    const auto& in = instance->value;
    const std::string name = formulation;
    auto model = std::make_unique<ctt_model>();
    if (name == "monolithic") {
      model->value = ctt::build_monolithic(in);
    } else if (name == "surface") {
      model->value = ctt::build_surface(in, {opt.stratified_room_bounds != 0});
    } else if (name == "surface2") {
      model->multirooms = ctt::build_multirooms(in, policy_of(opt.multiroom_policy));
      model->value = ctt::build_surface2(in, model->multirooms);
    } else if (auto kind = ctt::parse_neighborhood_kind(name)) {
      require(basis != nullptr, "dive formulations need a basis timetable");
      const auto verdict = ctt::check_hard(in, basis->value);
      if (!verdict.ok()) {
        throw ctt::ValidationError("basis timetable violates " +
                                   verdict.violations.front().detail);
      }
      const auto pa = ctt::PeriodAssignment::from_solution(in, basis->value);
      const auto n = ctt::make_neighborhood(in, *kind, pa, 0.0, 0);
      model->value = ctt::build_dive(in, ctt::build_monolithic(in), n);
    } else {
      throw ArgumentError("unknown formulation '" + name + "'");
    }
    if (opt.clique_cuts) {
      const auto graph = ctt::build_conflict_graph(in);
      ctt::add_clique_cuts(in, model->value, graph,
                           ctt::greedy_clique_cover(graph));
    }
    if (opt.implied_bound_cuts) ctt::add_implied_bound_cuts(in, model->value);
    if (opt.pattern_cuts) {
      ctt::add_pattern_cuts(in, model->value,
                            ctt::enumerate_patterns(in.periods_per_day()));
    }
    *out = model.release();
  });
}

ctt_status ctt_model_parse_mps(const char* text, size_t length,
                               ctt_model** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new ctt_model{ctt::parse_mps(std::string_view(text, length)), {}};
  });
}

void ctt_model_free(ctt_model* model) { delete model; }

ctt_status ctt_model_size(const ctt_model* model, int* variables,
                          int* constraints) {
  return guard([&] {
    require(model, "null argument");
    if (variables) *variables = model->value.variable_count();
    if (constraints) *constraints = model->value.constraint_count();
  });
}

ctt_status ctt_model_export_mps(const ctt_model* model, char** out) {
  return guard([&] {
    require(model && out, "null argument");
    *out = copy_string(ctt::export_mps(model->value));
  });
}

ctt_status ctt_model_encode(const ctt_instance* instance,
                            const ctt_model* model,
                            const ctt_solution* solution, char** out) {
  return guard([&] {
    require(instance && model && solution && out, "null argument");
    const auto values = ctt::encode_solution(instance->value, model->value,
                                             solution->value, model->multirooms);
    *out = copy_string(ctt::write_solution_values(model->value, values));
  });
}

ctt_status ctt_model_check_values(const ctt_model* model, const char* text,
                                  size_t length, int* feasible,
                                  double* objective) {
  return guard([&] {
    require(model && text, "null argument");
    const auto s =
        ctt::import_solution(model->value, std::string_view(text, length));
    if (feasible) *feasible = s.status == ctt::SolveStatus::kFeasible;
    if (objective) *objective = s.objective_value;
    if (s.status != ctt::SolveStatus::kFeasible) {
      last_error = "values violate " + s.violation;
    }
  });
}

ctt_status ctt_model_decode(const ctt_instance* instance,
                            const ctt_model* model, const char* text,
                            size_t length, ctt_solution** out) {
  return guard([&] {
    require(instance && model && text && out, "null argument");
    const auto s =
        ctt::import_solution(model->value, std::string_view(text, length));
    if (s.status != ctt::SolveStatus::kFeasible) {
      throw ctt::ValidationError("values violate " + s.violation);
    }
    *out = new ctt_solution{
        ctt::decode_monolithic(instance->value, model->value, s)};
  });
}

ctt_status ctt_model_solve(const ctt_model* model,
                           const ctt_solve_options* options,
                           ctt_milp_result* result, char** values) {
  return guard([&] {
    require(model && result, "null argument");
    ctt::SolveConfig config;
    if (options) {
      if (options->time_limit > 0) config.time_limit = options->time_limit;
      if (options->node_limit > 0) config.node_limit = options->node_limit;
      if (options->gap_target > 0) config.gap_target = options->gap_target;
    }
    const auto r = ctt::branch_and_bound(model->value, config);
    std::memset(result, 0, sizeof *result);
    std::strncpy(result->status, std::string(ctt::to_string(r.status)).c_str(),
                 sizeof result->status - 1);
    result->has_solution = r.incumbent.has_value();
    result->objective = r.incumbent ? r.incumbent->objective_value : 0.0;
    result->lower_bound = r.lower_bound;
    result->nodes = r.nodes;
    if (values) {
      *values = copy_string(
          r.incumbent ? ctt::write_solution_values(model->value,
                                                   r.incumbent->values)
                      : std::string());
    }
  });
}

void ctt_strategy_config_init(ctt_strategy_config* config, double total_time) {
  if (!config) return;
  std::memset(config, 0, sizeof *config);
  const auto c = ctt::StrategyConfig::scaled(total_time);
  config->strategy = CTT_STRATEGY_CONTRACT;
  config->surface = CTT_SURFACE;
  config->dive_count = 1;
  config->dive_kinds[0] = dive_code(ctt::NeighborhoodKind::kPeriodFixed);
  config->dive_times[0] = c.dive_budget(ctt::NeighborhoodKind::kPeriodFixed);
  config->surface_time = c.surface_time;
  config->total_time = c.total_time;
  config->dive_gap_stop = c.dive_gap_stop;
  config->dives_per_kind = c.dives_per_kind.value_or(0);
}

ctt_status ctt_run(const ctt_instance* instance,
                   const ctt_strategy_config* config, ctt_report** out) {
  return guard([&] {
    require(instance && config && out, "null argument");
    require(config->dive_count >= 1 && config->dive_count <= 4,
            "dive_count must be between 1 and 4");
    ctt::StrategyConfig c;
    require(config->strategy == CTT_STRATEGY_CONTRACT ||
                config->strategy == CTT_STRATEGY_ANYTIME,
            "unknown strategy");
    require(config->surface == CTT_SURFACE || config->surface == CTT_SURFACE2,
            "unknown surface model");
    c.strategy = config->strategy == CTT_STRATEGY_CONTRACT
                     ? ctt::Strategy::kContract
                     : ctt::Strategy::kAnytime;
    c.surface = config->surface == CTT_SURFACE ? ctt::SurfaceKind::kSurface
                                               : ctt::SurfaceKind::kSurface2;
    c.multiroom_policy = policy_of(config->multiroom_policy);
    c.surface_options.stratified_room_bounds = config->stratified_room_bounds != 0;
    c.surface_cuts = config->surface_cuts != 0;
    c.dive_sequence.clear();
    c.dive_time.clear();
    for (int i = 0; i < config->dive_count; ++i) {
      const auto kind = dive_of(config->dive_kinds[i]);
      c.dive_sequence.push_back(kind);
      c.dive_time[kind] = config->dive_times[i];
    }
    c.surface_time = config->surface_time;
    c.total_time = config->total_time;
    c.dive_gap_stop = config->dive_gap_stop;
    if (config->dives_per_kind > 0) c.dives_per_kind = config->dives_per_kind;
    c.deterministic = config->deterministic != 0;
    if (config->surface_node_limit > 0) {
      c.surface_node_limit = config->surface_node_limit;
    }
    if (config->dive_node_limit > 0) c.dive_node_limit = config->dive_node_limit;
    *out = new ctt_report{ctt::run_strategy(instance->value, c)};
  });
}

void ctt_report_free(ctt_report* report) { delete report; }

ctt_status ctt_report_text(const ctt_report* report, char** out) {
  return guard([&] {
    require(report && out, "null argument");
    *out = copy_string(ctt::report_text(report->value));
  });
}

ctt_status ctt_report_json(const ctt_report* report, char** out) {
  return guard([&] {
    require(report && out, "null argument");
    *out = copy_string(ctt::report_json(report->value));
  });
}

ctt_status ctt_report_jsonl(const ctt_report* report, char** out) {
  return guard([&] {
    require(report && out, "null argument");
    *out = copy_string(ctt::report_jsonl(report->value));
  });
}

ctt_status ctt_report_bounds(const ctt_report* report, ctt_bounds* out) {
  return guard([&] {
    require(report && out, "null argument");
    const auto& r = report->value;
    std::memset(out, 0, sizeof *out);
    out->infeasible = r.infeasible;
    out->has_upper = r.best_upper.has_value();
    out->upper = r.best_upper.value_or(0);
    out->has_lower = r.best_lower.has_value();
    out->lower = r.best_lower.value_or(0);
  });
}

ctt_status ctt_report_solution(const ctt_report* report, ctt_solution** out) {
  return guard([&] {
    require(report && out, "null argument");
    *out = report->value.solution ? new ctt_solution{*report->value.solution}
                                  : nullptr;
  });
}

ctt_status ctt_gap(long long upper, long long lower, char** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = copy_string(ctt::gap(upper, lower).to_string());
  });
}

}  // extern "C"
