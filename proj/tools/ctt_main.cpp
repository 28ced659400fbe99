#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctt/ctt.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr double kCpuUnitSeconds = 780.0;

struct Failure {
  int exit_code;
};

int exit_code_of(ctt_status status) {
  return status == CTT_ERR_PARSE || status == CTT_ERR_ARGUMENT ? kExitUsage
                                                               : kExitFailed;
}

void check(ctt_status status, const std::string& context) {
  if (status == CTT_OK) return;
  std::cerr << "error: " << context << ": " << ctt_last_error() << "\n";
  throw Failure{exit_code_of(status)};
}

struct StringDeleter {
  void operator()(char* s) const { ctt_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct InstanceDeleter {
  void operator()(ctt_instance* p) const { ctt_instance_free(p); }
};
struct SolutionDeleter {
  void operator()(ctt_solution* p) const { ctt_solution_free(p); }
};
struct ModelDeleter {
  void operator()(ctt_model* p) const { ctt_model_free(p); }
};
struct ReportDeleter {
  void operator()(ctt_report* p) const { ctt_report_free(p); }
};
using Instance = std::unique_ptr<ctt_instance, InstanceDeleter>;
using Solution = std::unique_ptr<ctt_solution, SolutionDeleter>;
using Model = std::unique_ptr<ctt_model, ModelDeleter>;
using Report = std::unique_ptr<ctt_report, ReportDeleter>;

std::string take(char* raw) {
  OwnedString owned(raw);
  return owned ? std::string(owned.get()) : std::string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    throw Failure{kExitFailed};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "error: cannot write '" << path << "'\n";
    throw Failure{kExitFailed};
  }
}

void print_location_error(ctt_status status, const std::string& path) {
  std::cerr << "error: " << path << ": " << ctt_last_error() << "\n";
  throw Failure{exit_code_of(status)};
}

struct WeightsOption {
  std::vector<int> values;
};

Instance load_instance(const std::string& path, const WeightsOption& weights) {
  ctt_instance* raw = nullptr;
  const auto status = ctt_instance_load(path.c_str(), &raw);
  if (status != CTT_OK) print_location_error(status, path);
  Instance instance(raw);
  if (!weights.values.empty()) {
    const ctt_weights w{weights.values[0], weights.values[1], weights.values[2],
                        weights.values[3]};
    check(ctt_instance_set_weights(instance.get(), &w), "weights");
  }
  return instance;
}

Solution load_solution(const ctt_instance* instance, const std::string& path) {
  ctt_solution* raw = nullptr;
  const auto status = ctt_solution_load(instance, path.c_str(), &raw);
  if (status != CTT_OK) print_location_error(status, path);
  return Solution(raw);
}

void add_weights(CLI::App* cmd, WeightsOption& weights) {
  cmd->add_option("--weights", weights.values,
                  "capacity,spread,compactness,stability weights")
      ->delimiter(',')
      ->expected(4);
}

int dive_code(const std::string& name) {
  static const std::map<std::string, int> codes{
      {"period-fixed", CTT_DIVE_PERIOD_FIXED},
      {"day-fixed", CTT_DIVE_DAY_FIXED},
      {"day-decomp", CTT_DIVE_DAY_DECOMP},
      {"day-fixed-zero-stability", CTT_DIVE_DAY_FIXED_ZERO_STABILITY}};
  auto it = codes.find(name);
  if (it == codes.end()) {
    std::cerr << "error: unknown dive kind '" << name << "'\n";
    throw Failure{kExitUsage};
  }
  return it->second;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string instance;
};

int run_validate(const ValidateArgs& a) {
  auto instance = load_instance(a.instance, {});
  ctt_stats s;
  check(ctt_instance_stats(instance.get(), &s), "stats");
  std::cout << "valid " << s.name << ": " << s.courses << " courses, "
            << s.rooms << " rooms, " << s.periods << " periods, " << s.curricula
            << " curricula\n";
  return kExitOk;
}

struct StatsArgs {
  std::string instance;
  bool json = false;
};

int run_stats(const StatsArgs& a) {
  auto instance = load_instance(a.instance, {});
  ctt_stats s;
  check(ctt_instance_stats(instance.get(), &s), "stats");
  char line[512];
  if (a.json) {
    std::snprintf(line, sizeof line,
                  "{\"name\": \"%s\", \"rooms\": %d, \"periods\": %d, "
                  "\"courses\": %d, \"events\": %d, \"frequency\": %.2f, "
                  "\"utilisation\": %.2f, \"curricula\": %d, \"edges\": %ld, "
                  "\"density\": %.2f}\n",
                  s.name, s.rooms, s.periods, s.courses, s.events, s.frequency,
                  s.utilisation, s.curricula, s.edges, s.density);
    std::cout << line;
    return kExitOk;
  }
  std::cout << "instance     rooms periods courses events  freq%  util% "
               "curricula edges dens%\n";
  std::snprintf(line, sizeof line,
                "%-12s %5d %7d %7d %6d %6.2f %6.2f %9d %5ld %5.2f\n", s.name,
                s.rooms, s.periods, s.courses, s.events, s.frequency,
                s.utilisation, s.curricula, s.edges, s.density);
  std::cout << line;
  return kExitOk;
}

struct EvaluateArgs {
  std::string instance;
  std::string solution;
  WeightsOption weights;
};

int run_evaluate(const EvaluateArgs& a) {
  auto instance = load_instance(a.instance, a.weights);
  auto solution = load_solution(instance.get(), a.solution);
  ctt_evaluation e;
  char* violations = nullptr;
  check(ctt_evaluate(instance.get(), solution.get(), &e, &violations),
        "evaluate");
  const std::string details = take(violations);
  std::cout << "capacity     " << e.capacity << "\n"
            << "spread       " << e.spread << "\n"
            << "compactness  " << e.compactness << "\n"
            << "stability    " << e.stability << "\n"
            << "objective    " << e.objective << "\n"
            << "feasible     " << (e.feasible ? "yes" : "no") << "\n";
  if (!e.feasible) {
    std::cerr << e.violations << " hard constraint violations\n" << details;
    return kExitFailed;
  }
  return kExitOk;
}

struct BuildArgs {
  std::string instance;
  std::string formulation = "monolithic";
  std::string basis;
  std::string out;
  std::string encode;
  std::string values;
  std::string policy = "median-split";
  bool stratified = false;
  bool clique_cuts = false;
  bool implied_cuts = false;
  bool pattern_cuts = false;
  WeightsOption weights;
};

int run_build(const BuildArgs& a) {
  auto instance = load_instance(a.instance, a.weights);
  Solution basis;
  if (!a.basis.empty()) basis = load_solution(instance.get(), a.basis);
  ctt_build_options options;
  ctt_build_options_init(&options);
  options.multiroom_policy = a.policy.c_str();
  options.stratified_room_bounds = a.stratified;
  options.clique_cuts = a.clique_cuts;
  options.implied_bound_cuts = a.implied_cuts;
  options.pattern_cuts = a.pattern_cuts;
  ctt_model* raw = nullptr;
  check(ctt_model_build(instance.get(), a.formulation.c_str(), basis.get(),
                        &options, &raw),
        "build " + a.formulation);
  Model model(raw);
  char* mps = nullptr;
  check(ctt_model_export_mps(model.get(), &mps), "export");
  write_output(a.out, take(mps));
  if (!a.encode.empty()) {
    auto known = load_solution(instance.get(), a.encode);
    char* values = nullptr;
    check(ctt_model_encode(instance.get(), model.get(), known.get(), &values),
          "encode");
    write_output(a.values, take(values));
  }
  int vars = 0, rows = 0;
  check(ctt_model_size(model.get(), &vars, &rows), "size");
  std::cerr << a.formulation << ": " << vars << " variables, " << rows
            << " constraints\n";
  return kExitOk;
}

struct MilpArgs {
  std::string mps;
  std::string check_values;
  std::string values_out;
  double time_limit = 0.0;
  long node_limit = 0;
};

int run_milp(const MilpArgs& a) {
  const std::string text = read_file(a.mps);
  ctt_model* raw = nullptr;
  const auto status = ctt_model_parse_mps(text.data(), text.size(), &raw);
  if (status != CTT_OK) print_location_error(status, a.mps);
  Model model(raw);
  char buf[64];
  if (!a.check_values.empty()) {
    const std::string values = read_file(a.check_values);
    int feasible = 0;
    double objective = 0.0;
    check(ctt_model_check_values(model.get(), values.data(), values.size(),
                                 &feasible, &objective),
          "check " + a.check_values);
    std::snprintf(buf, sizeof buf, "%.10g", objective);
    std::cout << "objective    " << buf << "\n"
              << "feasible     " << (feasible ? "yes" : "no") << "\n";
    if (!feasible) {
      std::cerr << ctt_last_error() << "\n";
      return kExitFailed;
    }
    return kExitOk;
  }
  ctt_solve_options options{a.time_limit, a.node_limit, 0.0};
  ctt_milp_result result;
  char* values = nullptr;
  check(ctt_model_solve(model.get(), &options, &result, &values), "solve");
  const std::string value_text = take(values);
  std::cout << "status       " << result.status << "\n";
  if (result.has_solution) {
    std::snprintf(buf, sizeof buf, "%.10g", result.objective);
    std::cout << "objective    " << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.10g", result.lower_bound);
  std::cout << "lower bound  " << buf << "\n"
            << "nodes        " << result.nodes << "\n";
  if (!a.values_out.empty() && result.has_solution) {
    write_output(a.values_out, value_text);
  }
  return std::string(result.status) == "infeasible" ? kExitFailed : kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string strategy = "contract";
  std::string surface = "surface";
  std::string policy = "median-split";
  std::vector<std::string> dives{"period-fixed"};
  std::vector<std::string> dive_times;
  std::optional<double> surface_time;
  std::optional<double> total_time;
  std::optional<double> cpu_units;
  double gap_stop = 0.02;
  int dives_per_kind = 1;
  bool stratified = false;
  bool cuts = false;
  long surface_nodes = 0;
  long dive_nodes = 0;
  bool deterministic = false;
  long seed = 0;
  std::string solution_out;
  std::string report_out;
  std::string events_out;
  bool json = false;
  WeightsOption weights;
};

int run_solve(const SolveArgs& a) {
  auto instance = load_instance(a.instance, a.weights);
  double total = a.total_time.value_or(kCpuUnitSeconds);
  if (a.cpu_units) total = *a.cpu_units * kCpuUnitSeconds;
  ctt_strategy_config config;
  ctt_strategy_config_init(&config, total);
  config.strategy =
      a.strategy == "anytime" ? CTT_STRATEGY_ANYTIME : CTT_STRATEGY_CONTRACT;
  config.surface = a.surface == "surface2" ? CTT_SURFACE2 : CTT_SURFACE;
  config.multiroom_policy = a.policy.c_str();
  config.stratified_room_bounds = a.stratified;
  config.surface_cuts = a.cuts;
  if (a.surface_time) config.surface_time = *a.surface_time;
  if (a.dives.empty() || a.dives.size() > 4) {
    std::cerr << "error: between one and four dive kinds are required\n";
    return kExitUsage;
  }
  const double default_dive = config.dive_times[0];
  config.dive_count = static_cast<int>(a.dives.size());
  for (std::size_t i = 0; i < a.dives.size(); ++i) {
    config.dive_kinds[i] = dive_code(a.dives[i]);
    config.dive_times[i] = default_dive;
  }
  for (const auto& entry : a.dive_times) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --dive-time expects kind=seconds, got '" << entry
                << "'\n";
      return kExitUsage;
    }
    const int code = dive_code(entry.substr(0, eq));
    double seconds = 0.0;
    try {
      seconds = std::stod(entry.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "error: bad seconds in --dive-time '" << entry << "'\n";
      return kExitUsage;
    }
    bool found = false;
    for (int i = 0; i < config.dive_count; ++i) {
      if (config.dive_kinds[i] == code) {
        config.dive_times[i] = seconds;
        found = true;
      }
    }
    if (!found) {
      std::cerr << "error: --dive-time for a kind not in --dives\n";
      return kExitUsage;
    }
  }
  config.dive_gap_stop = a.gap_stop;
  config.dives_per_kind = a.dives_per_kind;
  config.deterministic = a.deterministic;
  config.surface_node_limit = a.surface_nodes;
  config.dive_node_limit = a.dive_nodes;

  ctt_report* raw = nullptr;
  check(ctt_run(instance.get(), &config, &raw), "solve");
  Report report(raw);
  char* text = nullptr;
  if (a.json) {
    check(ctt_report_json(report.get(), &text), "report");
  } else {
    check(ctt_report_text(report.get(), &text), "report");
  }
  write_output(a.report_out, take(text));
  if (!a.events_out.empty()) {
    char* events = nullptr;
    check(ctt_report_jsonl(report.get(), &events), "report");
    write_output(a.events_out, take(events));
  }
  ctt_bounds bounds;
  check(ctt_report_bounds(report.get(), &bounds), "report");
  if (bounds.infeasible) {
    std::cerr << "instance is infeasible\n";
    return kExitFailed;
  }
  if (!a.solution_out.empty()) {
    ctt_solution* found = nullptr;
    check(ctt_report_solution(report.get(), &found), "report");
    Solution solution(found);
    if (!solution) {
      std::cerr << "no timetable found within the budget\n";
    } else {
      char* sol = nullptr;
      check(ctt_solution_write(instance.get(), solution.get(), &sol),
            "solution");
      write_output(a.solution_out, take(sol));
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum-based course timetabling by surface search and dives"};
  app.require_subcommand(1);

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "Check that an instance file is valid");
  v->add_option("instance", validate.instance)->required()->check(CLI::ExistingFile);

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Print instance statistics");
  s->add_option("instance", stats.instance)->required()->check(CLI::ExistingFile);
  s->add_flag("--json", stats.json, "JSON output");

  EvaluateArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "Score a timetable");
  e->add_option("instance", evaluate.instance)->required()->check(CLI::ExistingFile);
  e->add_option("solution", evaluate.solution)->required()->check(CLI::ExistingFile);
  add_weights(e, evaluate.weights);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Write a formulation as MPS");
  b->add_option("instance", build.instance)->required()->check(CLI::ExistingFile);
  b->add_option("-f,--formulation", build.formulation,
                "monolithic, surface, surface2, period-fixed, day-fixed, "
                "day-decomp or day-fixed-zero-stability");
  b->add_option("--basis", build.basis, "timetable fixing periods or days for dives")
      ->check(CLI::ExistingFile);
  b->add_option("-o,--out", build.out, "MPS output path (default stdout)");
  b->add_option("--encode", build.encode,
                "timetable to express as variable values")
      ->check(CLI::ExistingFile);
  b->add_option("--values", build.values, "output path for --encode values");
  b->add_option("--multiroom-policy", build.policy);
  b->add_flag("--stratified", build.stratified, "stratified room bounds on surface");
  b->add_flag("--clique-cuts", build.clique_cuts);
  b->add_flag("--implied-cuts", build.implied_cuts);
  b->add_flag("--pattern-cuts", build.pattern_cuts);
  add_weights(b, build.weights);

  MilpArgs milp;
  auto* m = app.add_subcommand("milp", "Solve or check an MPS model");
  m->add_option("mps", milp.mps)->required()->check(CLI::ExistingFile);
  m->add_option("--check", milp.check_values, "name/value file to verify")
      ->check(CLI::ExistingFile);
  m->add_option("--values", milp.values_out, "write solution values here");
  m->add_option("--time-limit", milp.time_limit)->check(CLI::NonNegativeNumber);
  m->add_option("--node-limit", milp.node_limit)->check(CLI::NonNegativeNumber);

  SolveArgs solve;
  auto* so = app.add_subcommand("solve", "Run the contract or anytime strategy");
  so->add_option("instance", solve.instance)->required()->check(CLI::ExistingFile);
  so->add_option("--strategy", solve.strategy)
      ->check(CLI::IsMember({"contract", "anytime"}));
  so->add_option("--surface", solve.surface)
      ->check(CLI::IsMember({"surface", "surface2"}));
  so->add_option("--multiroom-policy", solve.policy);
  so->add_option("--dives", solve.dives, "dive kinds in order")->delimiter(',');
  so->add_option("--dive-time", solve.dive_times, "kind=seconds per dive");
  so->add_option("--surface-time", solve.surface_time)->check(CLI::PositiveNumber);
  auto* total = so->add_option("--total-time", solve.total_time)
                    ->check(CLI::PositiveNumber);
  so->add_option("--cpu-units", solve.cpu_units, "budget in units of 780 s")
      ->check(CLI::PositiveNumber)
      ->excludes(total);
  so->add_option("--gap-stop", solve.gap_stop)->check(CLI::Range(0.0, 0.999));
  so->add_option("--dives-per-kind", solve.dives_per_kind, "0 for no limit")
      ->check(CLI::NonNegativeNumber);
  so->add_flag("--stratified", solve.stratified);
  so->add_flag("--cuts", solve.cuts, "clique and implied-bound cuts on the surface");
  so->add_option("--surface-node-limit", solve.surface_nodes)
      ->check(CLI::NonNegativeNumber);
  so->add_option("--dive-node-limit", solve.dive_nodes)
      ->check(CLI::NonNegativeNumber);
  so->add_flag("--deterministic", solve.deterministic,
               "node limits only; reports omit timings");
  so->add_option("--seed", solve.seed, "reserved; runs are deterministic");
  so->add_option("--solution", solve.solution_out, "timetable output path");
  so->add_option("--report", solve.report_out, "report output path (default stdout)");
  so->add_option("--events", solve.events_out, "JSON lines ledger output path");
  so->add_flag("--json", solve.json, "JSON report");
  add_weights(so, solve.weights);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*v) return run_validate(validate);
    if (*s) return run_stats(stats);
    if (*e) return run_evaluate(evaluate);
    if (*b) return run_build(build);
    if (*m) return run_milp(milp);
    if (*so) return run_solve(solve);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitUsage;
}
